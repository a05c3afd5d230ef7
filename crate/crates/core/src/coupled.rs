//! Double JC model with an Ising or anisotropic XY coupling between the atoms,
//! evolved exactly within a truncated product basis.
//!
//! Both couplings equal `g`; a realization rescales them to `g (1 + delta_A)` and
//! `g (1 + delta_B)`. The free part counts excitations (excited atoms plus
//! photons) at frequency `omega`, which commutes with the JC terms at resonance.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{self, DisorderKind, DisorderSpec, QuenchEstimate, QuenchPlan};
use crate::entanglement::{concurrence_general, partial_trace_cavities, NORM_TOL};
use crate::series::TimeSeries;
use crate::truncated::{ProductLabel, TruncatedBasis, TruncatedState};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Interaction {
    /// `jz sigma_z^A sigma_z^B`.
    Ising { jz: f64 },
    /// `J (1 + gamma) sigma_x^A sigma_x^B + J (1 - gamma) sigma_y^A sigma_y^B`.
    Xy { j: f64, gamma: f64 },
}

impl Interaction {
    pub fn basis(&self) -> TruncatedBasis {
        match self {
            Interaction::Ising { .. } => TruncatedBasis::ising(),
            Interaction::Xy { .. } => TruncatedBasis::xy(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Interaction::Ising { .. } => "ising",
            Interaction::Xy { .. } => "xy",
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interaction::Ising { jz } => write!(f, "ising(jz={jz})"),
            Interaction::Xy { j, gamma } => write!(f, "xy(j={j}, gamma={gamma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledParams {
    pub g: f64,
    pub omega: f64,
    pub interaction: Interaction,
}

impl CoupledParams {
    /// Unit coupling and unit excitation frequency.
    pub fn new(interaction: Interaction) -> Self {
        Self {
            g: 1.0,
            omega: 1.0,
            interaction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::validation(format!("coupling must be positive, got {}", self.g)));
        }
        let finite = match self.interaction {
            Interaction::Ising { jz } => jz.is_finite(),
            Interaction::Xy { j, gamma } => j.is_finite() && gamma.is_finite(),
        };
        if !finite || !self.omega.is_finite() {
            return Err(Error::validation("non-finite interaction parameters"));
        }
        Ok(())
    }
}

/// Dense Hermitian matrix over a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    basis: TruncatedBasis,
    matrix: DMatrix<C64>,
}

impl HamiltonianMatrix {
    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn element(&self, bra: &ProductLabel, ket: &ProductLabel) -> Option<C64> {
        Some(self.matrix[(self.basis.index_of(bra)?, self.basis.index_of(ket)?)])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn expectation(&self, psi: &TruncatedState) -> f64 {
        let v = psi.amplitudes();
        v.dotc(&(&self.matrix * v)).re
    }
}

fn sigma_z(atom: u8) -> f64 {
    if atom == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Images `(label, coefficient)` of `H |ket>` in the full space.
fn apply(params: &CoupledParams, ga: f64, gb: f64, ket: &ProductLabel) -> Vec<(ProductLabel, f64)> {
    let mut out = vec![(*ket, params.omega * ket.excitations() as f64)];
    let k = *ket;
    // sigma_+ a + sigma_- a^dagger on each side
    if k.atom_a == 0 && k.cav_a > 0 {
        out.push((ProductLabel { atom_a: 1, cav_a: k.cav_a - 1, ..k }, ga * (k.cav_a as f64).sqrt()));
    }
    if k.atom_a == 1 {
        out.push((ProductLabel { atom_a: 0, cav_a: k.cav_a + 1, ..k }, ga * ((k.cav_a + 1) as f64).sqrt()));
    }
    if k.atom_b == 0 && k.cav_b > 0 {
        out.push((ProductLabel { atom_b: 1, cav_b: k.cav_b - 1, ..k }, gb * (k.cav_b as f64).sqrt()));
    }
    if k.atom_b == 1 {
        out.push((ProductLabel { atom_b: 0, cav_b: k.cav_b + 1, ..k }, gb * ((k.cav_b + 1) as f64).sqrt()));
    }
    match params.interaction {
        Interaction::Ising { jz } => {
            out.push((k, jz * sigma_z(k.atom_a) * sigma_z(k.atom_b)));
        }
        Interaction::Xy { j, gamma } => {
            // 2J (s+ s- + s- s+) + 2J gamma (s+ s+ + s- s-)
            let flipped = ProductLabel { atom_a: 1 - k.atom_a, atom_b: 1 - k.atom_b, ..k };
            let coeff = if k.atom_a == k.atom_b { 2.0 * j * gamma } else { 2.0 * j };
            out.push((flipped, coeff));
        }
    }
    out
}

/// Galerkin projection of the Hamiltonian onto the interaction's basis;
/// matrix elements leading out of the basis are dropped.
pub fn build_hamiltonian(params: &CoupledParams, delta_a: f64, delta_b: f64) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let basis = params.interaction.basis();
    let ga = params.g * (1.0 + delta_a);
    let gb = params.g * (1.0 + delta_b);
    let dim = basis.dim();
    let mut matrix = DMatrix::zeros(dim, dim);
    for (j, ket) in basis.labels().iter().enumerate() {
        for (bra, coeff) in apply(params, ga, gb, ket) {
            if let Some(i) = basis.index_of(&bra) {
                matrix[(i, j)] += C64::new(coeff, 0.0);
            }
        }
    }
    Ok(HamiltonianMatrix { basis, matrix })
}

/// `exp(-i H t)` through one Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    basis: TruncatedBasis,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &HamiltonianMatrix) -> Result<Self> {
        let eig = h
            .matrix
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or_else(|| {
                Error::numerical("Hamiltonian eigensolver did not converge", Some(format!("{}", h.matrix)))
            })?;
        Ok(Self {
            basis: h.basis.clone(),
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    /// Fixes the initial state so that each time costs one matrix-vector product.
    pub fn trajectory(&self, psi0: &TruncatedState) -> Result<Trajectory<'_>> {
        if psi0.basis() != &self.basis {
            return Err(Error::validation("initial state lives in a different basis"));
        }
        if !psi0.is_normalized(NORM_TOL) {
            return Err(Error::validation(format!("initial state norm {} != 1", psi0.norm())));
        }
        Ok(Trajectory {
            prop: self,
            coeffs: self.vectors.adjoint() * psi0.amplitudes(),
        })
    }

    pub fn evolve(&self, psi0: &TruncatedState, t: f64) -> Result<TruncatedState> {
        self.trajectory(psi0)?.at(t)
    }
}

pub struct Trajectory<'a> {
    prop: &'a Propagator,
    coeffs: DVector<C64>,
}

impl Trajectory<'_> {
    pub fn at(&self, t: f64) -> Result<TruncatedState> {
        let phased = DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs
                .iter()
                .zip(&self.prop.energies)
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        );
        TruncatedState::new(self.prop.basis.clone(), &self.prop.vectors * phased)
    }
}

/// `psi(t) = exp(-i H t) psi0`.
pub fn evolve(h: &HamiltonianMatrix, psi0: &TruncatedState, t: f64) -> Result<TruncatedState> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// `cos a |1_A 1_B 0 0> + sin a |0_A 0_B 0 0>`.
pub fn initial_state(basis: &TruncatedBasis, alpha: f64) -> Result<TruncatedState> {
    let (s, c) = alpha.sin_cos();
    TruncatedState::from_terms(
        basis.clone(),
        &[
            (ProductLabel::new(1, 1, 0, 0), C64::new(c, 0.0)),
            (ProductLabel::new(0, 0, 0, 0), C64::new(s, 0.0)),
        ],
    )
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&alpha) {
        return Err(Error::validation(format!("alpha must lie in [0, pi/2], got {alpha}")));
    }
    Ok(())
}

/// Concurrence of the two atoms along one realization's trajectory.
pub fn coupled_concurrence_series(
    params: &CoupledParams,
    alpha: f64,
    delta_a: f64,
    delta_b: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let h = build_hamiltonian(params, delta_a, delta_b)?;
    let prop = Propagator::new(&h)?;
    let psi0 = initial_state(h.basis(), alpha)?;
    let traj = prop.trajectory(&psi0)?;
    times
        .iter()
        .map(|&t| concurrence_general(&partial_trace_cavities(&traj.at(t)?)?))
        .collect()
}

pub fn coupled_concurrence(
    params: &CoupledParams,
    alpha: f64,
    delta_a: f64,
    delta_b: f64,
    t: f64,
) -> Result<f64> {
    Ok(coupled_concurrence_series(params, alpha, delta_a, delta_b, &[t])?[0])
}

/// Only Gaussian disorder matches the model's original setting.
pub fn is_experimental(spec: &DisorderSpec) -> bool {
    spec.kind() != DisorderKind::Gaussian && !spec.is_degenerate()
}

/// Quenched concurrence series, parallel over realizations.
pub fn coupled_quenched_series(
    params: &CoupledParams,
    alpha: f64,
    spec_a: &DisorderSpec,
    spec_b: &DisorderSpec,
    plan: &QuenchPlan,
    times: &[f64],
) -> Result<TimeSeries> {
    plan.validate_for(&[*spec_a, *spec_b])?;
    if spec_a.is_degenerate() && spec_b.is_degenerate() {
        let v = coupled_concurrence_series(params, alpha, 0.0, 0.0, times)?;
        return TimeSeries::exact(times.to_vec(), v);
    }
    let (da, db) = disorder::draw_pairs(spec_a, spec_b, plan)?;
    let rows = da
        .par_iter()
        .zip(db.par_iter())
        .map(|(&a, &b)| coupled_concurrence_series(params, alpha, a, b, times))
        .collect::<Result<Vec<_>>>()?;
    let est = disorder::reduce_rows(&rows, plan)?;
    TimeSeries::from_estimates(times.to_vec(), &est)
}

pub fn coupled_concurrence_quenched(
    params: &CoupledParams,
    alpha: f64,
    spec_a: &DisorderSpec,
    spec_b: &DisorderSpec,
    plan: &QuenchPlan,
    t: f64,
) -> Result<QuenchEstimate> {
    let s = coupled_quenched_series(params, alpha, spec_a, spec_b, plan, &[t])?;
    Ok(QuenchEstimate {
        estimate: s.value()[0],
        spread: s.spread()[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doublejc::{concurrence_clean, DoubleJcConfig, Family};
    use crate::series::time_grid;
    use std::f64::consts::PI;

    const ISING0: Interaction = Interaction::Ising { jz: 0.0 };

    fn l(a: u8, b: u8, na: u32, nb: u32) -> ProductLabel {
        ProductLabel::new(a, b, na, nb)
    }

    #[test]
    fn ising_structure() {
        let h = build_hamiltonian(&CoupledParams::new(ISING0), 0.0, 0.0).unwrap();
        let m = h.matrix();
        for i in 0..4 {
            assert_eq!(m[(4, i)], C64::new(0.0, 0.0));
        }
        let h = build_hamiltonian(&CoupledParams::new(Interaction::Ising { jz: 0.1 }), 0.3, 0.0).unwrap();
        let e = h.element(&l(1, 1, 0, 0), &l(0, 1, 1, 0)).unwrap();
        assert!((e.re - 1.3).abs() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn xy_pair_creation_element() {
        let p = CoupledParams::new(Interaction::Xy { j: 0.1, gamma: 0.5 });
        let h = build_hamiltonian(&p, 0.0, 0.0).unwrap();
        let e = h.element(&l(1, 1, 0, 0), &l(0, 0, 0, 0)).unwrap();
        // J_x - J_y = 2 J gamma
        assert!((e.re - 0.1).abs() < 1e-15);
        let e = h.element(&l(1, 0, 1, 0), &l(0, 1, 1, 0)).unwrap();
        assert!((e.re - 0.2).abs() < 1e-15);
        // |0_A 0_B 2_a 0_b> couples to |1_A 0_B 1_a 0_b> with sqrt 2
        let e = h.element(&l(0, 0, 2, 0), &l(1, 0, 1, 0)).unwrap();
        assert!((e.re - 2f64.sqrt()).abs() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn zero_time_is_identity() {
        let p = CoupledParams::new(Interaction::Xy { j: 0.1, gamma: 0.5 });
        let h = build_hamiltonian(&p, 0.1, -0.2).unwrap();
        let psi0 = initial_state(h.basis(), 0.4).unwrap();
        let psi = evolve(&h, &psi0, 0.0).unwrap();
        assert!((psi.amplitudes() - psi0.amplitudes()).norm() < 1e-14);
    }

    #[test]
    fn unitarity_energy_and_vacuum_amplitude() {
        for inter in [Interaction::Ising { jz: 1.0 }, Interaction::Xy { j: 0.1, gamma: 0.5 }] {
            let h = build_hamiltonian(&CoupledParams::new(inter), 0.2, -0.1).unwrap();
            let psi0 = initial_state(h.basis(), PI / 6.0).unwrap();
            let prop = Propagator::new(&h).unwrap();
            let traj = prop.trajectory(&psi0).unwrap();
            let e0 = h.expectation(&psi0);
            for k in 0..=200 {
                let psi = traj.at(k as f64 * 0.5).unwrap();
                assert!((psi.norm() - 1.0).abs() < 1e-12);
                assert!((h.expectation(&psi) - e0).abs() < 1e-10);
                if let Interaction::Ising { .. } = inter {
                    let a = psi.amplitude(&l(0, 0, 0, 0)).unwrap().norm();
                    assert!((a - 0.5).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ising_without_coupling_reproduces_closed_form() {
        let times = time_grid(25.0, 0.01).unwrap();
        let got = coupled_concurrence_series(&CoupledParams::new(ISING0), PI / 6.0, 0.0, 0.0, &times).unwrap();
        let cfg = DoubleJcConfig::symmetric(PI / 6.0, Family::Phi).unwrap();
        let err = times
            .iter()
            .zip(&got)
            .map(|(&t, &c)| (c - concurrence_clean(&cfg, t)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "sup error {err}");
    }
}
