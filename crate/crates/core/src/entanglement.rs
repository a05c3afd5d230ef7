//! Entropy, concurrence and partial traces.
//!
//! Two-qubit matrices use the basis order |11>, |10>, |01>, |00> (atom A first).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};

use crate::truncated::TruncatedState;
use crate::{Error, Result, C64};

/// Hermiticity, trace and positivity tolerance for two-qubit states.
pub const STATE_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance for single-qubit states.
pub const QUBIT_TOL: f64 = 1e-12;
/// Eigenvalues below `-NEGATIVE_LIMIT` signal an invalid state rather than roundoff.
pub const NEGATIVE_LIMIT: f64 = 1e-8;
/// Normalization tolerance of pure states entering a partial trace.
pub const NORM_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn hermiticity_defect<const D: usize>(m: &nalgebra::SMatrix<C64, D, D>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    m: Matrix2<C64>,
}

impl QubitDensity {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let herm = hermiticity_defect(&m);
        if herm > QUBIT_TOL {
            return Err(Error::validation(format!(
                "qubit density not Hermitian (defect {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > QUBIT_TOL || tr.im.abs() > QUBIT_TOL {
            return Err(Error::validation(format!("qubit density trace {tr} != 1")));
        }
        let rho = Self { m };
        let [lo, hi] = rho.eigenvalues_unclamped();
        if lo < -1e-10 || hi > 1.0 + 1e-10 {
            return Err(Error::validation(format!(
                "qubit density eigenvalues ({lo:e}, {hi}) outside [0, 1]"
            )));
        }
        Ok(rho)
    }

    /// `[[a, i b], [-i b, 1 - a]]`.
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        Self::new(Matrix2::new(c(a, 0.0), c(0.0, b), c(0.0, -b), c(1.0 - a, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.m
    }

    fn eigenvalues_unclamped(&self) -> [f64; 2] {
        let d = self.m[(0, 0)].re - self.m[(1, 1)].re;
        let r = (d * d + 4.0 * self.m[(0, 1)].norm_sqr()).sqrt();
        [0.5 * (1.0 - r), 0.5 * (1.0 + r)]
    }

    /// Ascending eigenvalues clamped to [0, 1].
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigenvalues_unclamped().map(|x| x.clamp(0.0, 1.0))
    }
}

/// Von Neumann entropy in bits, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &QubitDensity) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.recip().log2())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// A two-qubit density matrix.
///
/// When built from a pure state of a larger system, the conditional atomic
/// vectors (one per traced-out label) are retained; they factor the matrix as
/// `rho = sum_k v_k v_k^dagger` and let the concurrence avoid an eigensolve.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    m: Matrix4<C64>,
    branches: Option<Vec<Vector4<C64>>>,
}

impl TwoQubitDensity {
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let rho = Self { m, branches: None };
        rho.validate()?;
        Ok(rho)
    }

    /// `sum_k v_k v_k^dagger`; positive by construction, only the trace is checked.
    pub fn from_branches(branches: Vec<Vector4<C64>>) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for v in &branches {
            m += v * v.adjoint();
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!("two-qubit trace {tr} != 1")));
        }
        Ok(Self {
            m,
            branches: Some(branches),
        })
    }

    pub fn pure(v: Vector4<C64>) -> Result<Self> {
        Self::from_branches(vec![v])
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    pub fn branches(&self) -> Option<&[Vector4<C64>]> {
        self.branches.as_deref()
    }

    /// Hermiticity, unit trace and positivity within [`STATE_TOL`].
    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_defect(&self.m);
        if herm > STATE_TOL {
            return Err(Error::validation(format!(
                "two-qubit density not Hermitian (defect {herm:e})"
            )));
        }
        let tr = self.m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::validation(format!("two-qubit trace {tr} != 1")));
        }
        let min = self.eigen()?.0.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(Error::validation(format!(
                "two-qubit density not positive (eigenvalue {min:e})"
            )));
        }
        Ok(())
    }

    fn eigen(&self) -> Result<(Vec<f64>, Matrix4<C64>)> {
        let h = (self.m + self.m.adjoint()) * c(0.5, 0.0);
        let eig = h.try_symmetric_eigen(f64::EPSILON, 0).ok_or_else(|| {
            Error::numerical("Hermitian eigensolver did not converge", Some(format!("{}", self.m)))
        })?;
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }

    /// Columns `F` with `rho = F F^dagger`.
    fn factor(&self) -> Result<DMatrix<C64>> {
        if let Some(b) = &self.branches {
            return Ok(DMatrix::from_fn(4, b.len(), |i, k| b[k][i]));
        }
        let (vals, vecs) = self.eigen()?;
        let mut f = DMatrix::zeros(4, 4);
        for (k, &lam) in vals.iter().enumerate() {
            if lam < -NEGATIVE_LIMIT {
                return Err(Error::numerical(
                    format!("density has eigenvalue {lam:e}"),
                    Some(format!("{}", self.m)),
                ));
            }
            let s = lam.max(0.0).sqrt();
            for i in 0..4 {
                f[(i, k)] = vecs[(i, k)] * s;
            }
        }
        Ok(f)
    }

    /// Descending square roots of the eigenvalues of `rho * rho_tilde`.
    pub fn wootters_roots(&self) -> Result<[f64; 4]> {
        let f = self.factor()?;
        // sigma_y (x) sigma_y is the real anti-diagonal (-1, 1, 1, -1)
        let mut yf = DMatrix::zeros(4, f.ncols());
        for k in 0..f.ncols() {
            yf[(0, k)] = -f[(3, k)];
            yf[(1, k)] = f[(2, k)];
            yf[(2, k)] = f[(1, k)];
            yf[(3, k)] = -f[(0, k)];
        }
        let tau = f.transpose() * yf;
        let svd = tau.clone().try_svd(false, false, f64::EPSILON, 0).ok_or_else(|| {
            Error::numerical("SVD did not converge", Some(format!("{}", self.m)))
        })?;
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s.resize(4.max(s.len()), 0.0);
        let mut out = [s[0], s[1], s[2], s[3]];
        // rank <= 4: any further values are roundoff; fold them into the tail
        out[3] += s[4..].iter().sum::<f64>();
        Ok(out)
    }
}

/// Wootters concurrence `max(0, r1 - r2 - r3 - r4)`.
pub fn concurrence_general(rho: &TwoQubitDensity) -> Result<f64> {
    let r = rho.wootters_roots()?;
    Ok((r[0] - r[1] - r[2] - r[3]).clamp(0.0, 1.0))
}

/// A two-qubit state with only diagonal and anti-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    /// Populations of |11>, |10>, |01>, |00>.
    pub diag: [f64; 4],
    /// The |11><00| coherence.
    pub outer: C64,
    /// The |10><01| coherence.
    pub inner: C64,
}

impl XState {
    pub fn new(diag: [f64; 4], outer: C64, inner: C64) -> Result<Self> {
        if let Some(p) = diag.iter().find(|&&p| p < -STATE_TOL || !p.is_finite()) {
            return Err(Error::validation(format!("negative population {p}")));
        }
        let tr: f64 = diag.iter().sum();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!("X-state trace {tr} != 1")));
        }
        let [p11, p10, p01, p00] = diag.map(|p| p.max(0.0));
        if outer.norm() > (p11 * p00).sqrt() + STATE_TOL
            || inner.norm() > (p10 * p01).sqrt() + STATE_TOL
        {
            return Err(Error::validation("X-state coherence exceeds populations"));
        }
        Ok(Self { diag, outer, inner })
    }

    pub fn concurrence(&self) -> f64 {
        let [p11, p10, p01, p00] = self.diag.map(|p| p.max(0.0));
        let a = self.outer.norm() - (p10 * p01).sqrt();
        let b = self.inner.norm() - (p11 * p00).sqrt();
        (2.0 * a.max(b)).clamp(0.0, 1.0)
    }

    pub fn to_matrix(&self) -> Matrix4<C64> {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            m[(i, i)] = c(self.diag[i], 0.0);
        }
        m[(0, 3)] = self.outer;
        m[(3, 0)] = self.outer.conj();
        m[(1, 2)] = self.inner;
        m[(2, 1)] = self.inner.conj();
        m
    }

    pub fn to_density(&self) -> Result<TwoQubitDensity> {
        TwoQubitDensity::new(self.to_matrix())
    }
}

/// Closed-form concurrence of an X-state.
pub fn concurrence_xstate(diag: [f64; 4], outer: C64, inner: C64) -> Result<f64> {
    Ok(XState::new(diag, outer, inner)?.concurrence())
}

/// Reduced two-atom state: amplitudes grouped by cavity occupation.
pub fn partial_trace_cavities(psi: &TruncatedState) -> Result<TwoQubitDensity> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::validation(format!("state norm {norm} != 1")));
    }
    let mut branches: BTreeMap<(u32, u32), Vector4<C64>> = BTreeMap::new();
    for (label, amp) in psi.basis().labels().iter().zip(psi.amplitudes().iter()) {
        branches.entry(label.cavities()).or_insert_with(Vector4::zeros)[label.atom_index()] += amp;
    }
    TwoQubitDensity::from_branches(branches.into_values().collect())
}
