//! Labeled product bases and amplitude vectors for the two-atom, two-cavity system.

use std::borrow::Cow;
use std::fmt;

use nalgebra::DVector;

use crate::{Error, Result, C64};

/// `|atom_a, atom_b, cav_a, cav_b>`; atoms are 0 (ground) or 1 (excited),
/// cavities carry photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductLabel {
    pub atom_a: u8,
    pub atom_b: u8,
    pub cav_a: u32,
    pub cav_b: u32,
}

impl ProductLabel {
    pub const fn new(atom_a: u8, atom_b: u8, cav_a: u32, cav_b: u32) -> Self {
        Self {
            atom_a,
            atom_b,
            cav_a,
            cav_b,
        }
    }

    /// Excited atoms plus photons.
    pub fn excitations(&self) -> u32 {
        self.atom_a as u32 + self.atom_b as u32 + self.cav_a + self.cav_b
    }

    /// Position of the atomic part in the order |11>, |10>, |01>, |00>.
    pub fn atom_index(&self) -> usize {
        2 * (1 - self.atom_a as usize) + (1 - self.atom_b as usize)
    }

    pub fn cavities(&self) -> (u32, u32) {
        (self.cav_a, self.cav_b)
    }
}

impl fmt::Display for ProductLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}_A{}_B{}_a{}_b>",
            self.atom_a, self.atom_b, self.cav_a, self.cav_b
        )
    }
}

const fn l(a: u8, b: u8, na: u32, nb: u32) -> ProductLabel {
    ProductLabel::new(a, b, na, nb)
}

static ISING_LABELS: [ProductLabel; 5] = [
    l(1, 1, 0, 0),
    l(0, 1, 1, 0),
    l(1, 0, 0, 1),
    l(0, 0, 1, 1),
    l(0, 0, 0, 0),
];

static XY_LABELS: [ProductLabel; 9] = [
    l(1, 1, 0, 0),
    l(0, 1, 1, 0),
    l(1, 0, 0, 1),
    l(1, 0, 1, 0),
    l(0, 1, 0, 1),
    l(0, 0, 1, 1),
    l(0, 0, 2, 0),
    l(0, 0, 0, 2),
    l(0, 0, 0, 0),
];

/// An ordered list of distinct product states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedBasis {
    labels: Cow<'static, [ProductLabel]>,
}

impl TruncatedBasis {
    /// The five states reachable from `|1100>` and `|0000>` under JC plus sigma_z sigma_z.
    pub fn ising() -> Self {
        Self {
            labels: Cow::Borrowed(&ISING_LABELS),
        }
    }

    /// Nine states with at most two photons in the cavities.
    pub fn xy() -> Self {
        Self {
            labels: Cow::Borrowed(&XY_LABELS),
        }
    }

    pub fn custom(labels: Vec<ProductLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("empty basis"));
        }
        for (i, a) in labels.iter().enumerate() {
            if a.atom_a > 1 || a.atom_b > 1 {
                return Err(Error::validation(format!("atom label out of range in {a}")));
            }
            if labels[..i].contains(a) {
                return Err(Error::validation(format!("duplicate basis label {a}")));
            }
        }
        Ok(Self {
            labels: Cow::Owned(labels),
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ProductLabel] {
        &self.labels
    }

    pub fn index_of(&self, label: &ProductLabel) -> Option<usize> {
        self.labels.iter().position(|x| x == label)
    }
}

/// Complex amplitudes over a [`TruncatedBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    basis: TruncatedBasis,
    amps: DVector<C64>,
}

impl TruncatedState {
    pub fn new(basis: TruncatedBasis, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::validation(format!(
                "{} amplitudes for a basis of dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amps })
    }

    /// Superposition of labeled terms; every label must belong to the basis.
    pub fn from_terms(basis: TruncatedBasis, terms: &[(ProductLabel, C64)]) -> Result<Self> {
        let mut amps = DVector::zeros(basis.dim());
        for (label, amp) in terms {
            let i = basis
                .index_of(label)
                .ok_or_else(|| Error::validation(format!("{label} not in basis")))?;
            amps[i] += amp;
        }
        Self::new(basis, amps)
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, label: &ProductLabel) -> Option<C64> {
        self.basis.index_of(label).map(|i| self.amps[i])
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_index_order() {
        assert_eq!(l(1, 1, 0, 0).atom_index(), 0);
        assert_eq!(l(1, 0, 3, 0).atom_index(), 1);
        assert_eq!(l(0, 1, 0, 0).atom_index(), 2);
        assert_eq!(l(0, 0, 1, 1).atom_index(), 3);
    }

    #[test]
    fn bases_have_expected_shape() {
        let ising = TruncatedBasis::ising();
        assert_eq!(ising.dim(), 5);
        assert!(ising.labels()[..4].iter().all(|x| x.excitations() == 2));
        let xy = TruncatedBasis::xy();
        assert_eq!(xy.dim(), 9);
        assert!(xy.labels().iter().all(|x| x.cav_a + x.cav_b <= 2));
        assert!(TruncatedBasis::custom(vec![l(0, 0, 0, 0), l(0, 0, 0, 0)]).is_err());
    }

    #[test]
    fn terms_must_be_in_basis() {
        let one = C64::new(1.0, 0.0);
        assert!(TruncatedState::from_terms(TruncatedBasis::ising(), &[(l(1, 0, 1, 0), one)]).is_err());
        let s = TruncatedState::from_terms(TruncatedBasis::xy(), &[(l(1, 0, 1, 0), one)]).unwrap();
        assert!(s.is_normalized(1e-15));
    }
}
