//! Single Jaynes-Cummings model at resonance, atom initially in its ground state.
//!
//! A disorder realization rescales the coupling, `g -> g (1 + delta)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{
    self, CompensatedSum, DisorderKind, DisorderSpec, QuenchEstimate, QuenchPlan,
};
use crate::entanglement::{von_neumann_entropy, QubitDensity};
use crate::series::TimeSeries;
use crate::{Error, Result};

/// Half-width of the Fock window in units of the photon-number spread.
pub const WINDOW_SIGMAS: f64 = 10.0;

/// Truncated, renormalized Gaussian photon-number distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonDistribution {
    nbar: f64,
    dn: f64,
    n_min: u32,
    weights: Vec<f64>,
}

/// Weights `C_n^2 ~ exp(-(n - nbar)^2 / (2 dn^2))` on `nbar +- 10 dn`, clipped at zero.
pub fn photon_weights(nbar: f64, dn: f64) -> Result<PhotonDistribution> {
    if !(nbar > 0.0 && nbar.is_finite()) || !(dn > 0.0 && dn.is_finite()) {
        return Err(Error::validation(format!(
            "photon distribution needs nbar > 0 and dn > 0, got ({nbar}, {dn})"
        )));
    }
    let lo = (nbar - WINDOW_SIGMAS * dn).max(0.0).floor();
    let hi = (nbar + WINDOW_SIGMAS * dn).ceil();
    if hi < lo || hi > u32::MAX as f64 {
        return Err(Error::validation("empty or oversized Fock window"));
    }
    let (n_min, n_max) = (lo as u32, hi as u32);
    let raw: Vec<f64> = (n_min..=n_max)
        .map(|n| {
            let x = (n as f64 - nbar) / dn;
            (-0.5 * x * x).exp()
        })
        .collect();
    let total = raw.iter().copied().collect::<CompensatedSum>().value();
    if !(total > 0.0) {
        return Err(Error::validation("photon window carries no weight"));
    }
    Ok(PhotonDistribution {
        nbar,
        dn,
        n_min,
        weights: raw.into_iter().map(|w| w / total).collect(),
    })
}

impl PhotonDistribution {
    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn dn(&self) -> f64 {
        self.dn
    }

    pub fn n_min(&self) -> u32 {
        self.n_min
    }

    pub fn n_max(&self) -> u32 {
        self.n_min + self.weights.len() as u32 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(n, C_n^2)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, &w)| (self.n_min + k as u32, w))
    }

    pub fn weight(&self, n: u32) -> f64 {
        n.checked_sub(self.n_min)
            .and_then(|k| self.weights.get(k as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.iter()
            .map(|(n, w)| n as f64 * w)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Set when the spread is not small against the mean.
    pub fn warning(&self) -> Option<String> {
        (self.dn > self.nbar / 5.0).then(|| {
            format!(
                "dn = {} exceeds nbar / 5 = {}; far from the sub-Poissonian regime",
                self.dn,
                self.nbar / 5.0
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleJcConfig {
    g: f64,
    photons: PhotonDistribution,
}

impl SingleJcConfig {
    pub fn new(g: f64, photons: PhotonDistribution) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::validation(format!("coupling must be positive, got {g}")));
        }
        Ok(Self { g, photons })
    }

    /// `g = 1` with a Gaussian field of mean `nbar` and spread `dn`.
    pub fn with_field(nbar: f64, dn: f64) -> Result<Self> {
        Self::new(1.0, photon_weights(nbar, dn)?)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn photons(&self) -> &PhotonDistribution {
        &self.photons
    }
}

pub fn revival_period(cfg: &SingleJcConfig) -> f64 {
    2.0 * PI * cfg.photons.nbar.sqrt() / cfg.g
}

/// `sum_n C_n^2 cos(2 g t sqrt n) * factor(n)`.
fn weighted_cos(cfg: &SingleJcConfig, t: f64, factor: impl Fn(f64) -> f64) -> f64 {
    cfg.photons
        .iter()
        .map(|(n, w)| {
            let rn = (n as f64).sqrt();
            w * (2.0 * cfg.g * t * rn).cos() * factor(rn)
        })
        .sum()
}

/// `sum_n C_n^2 f(2 g t sqrt n)`.
fn weighted_phase(cfg: &SingleJcConfig, t: f64, f: impl Fn(f64) -> f64) -> f64 {
    cfg.photons
        .iter()
        .map(|(n, w)| w * f(2.0 * cfg.g * t * (n as f64).sqrt()))
        .sum()
}

pub fn inversion_clean(cfg: &SingleJcConfig, t: f64) -> f64 {
    weighted_phase(cfg, t, f64::cos)
}

/// Inversion for one disorder realization.
pub fn inversion_realization(cfg: &SingleJcConfig, delta: f64, t: f64) -> f64 {
    weighted_phase(cfg, t, |x| (x + delta * x).cos())
}

pub fn inversion_gaussian(cfg: &SingleJcConfig, s: f64, t: f64) -> f64 {
    let k = 2.0 * (s * cfg.g * t).powi(2);
    weighted_cos(cfg, t, |rn| (-k * rn * rn).exp())
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn inversion_uniform(cfg: &SingleJcConfig, s: f64, t: f64) -> f64 {
    let w = 3f64.sqrt() * s;
    weighted_cos(cfg, t, |rn| sinc(2.0 * w * cfg.g * t * rn))
}

/// `sum C_n^2 cos(2 g t sqrt n) cos(2 s g t sqrt n)`, summed as the two atom phases.
pub fn inversion_discrete(cfg: &SingleJcConfig, s: f64, t: f64) -> f64 {
    weighted_phase(cfg, t, |x| 0.5 * ((x + s * x).cos() + (x - s * x).cos()))
}

/// Exact disorder average; `None` for Cauchy-Lorentz disorder.
pub fn inversion_closed_form(cfg: &SingleJcConfig, spec: &DisorderSpec, t: f64) -> Option<f64> {
    let s = spec.strength();
    match spec.kind() {
        DisorderKind::Gaussian => Some(inversion_gaussian(cfg, s, t)),
        DisorderKind::Uniform => Some(inversion_uniform(cfg, s, t)),
        DisorderKind::Discrete => Some(inversion_discrete(cfg, s, t)),
        DisorderKind::Cauchy if spec.is_degenerate() => Some(inversion_clean(cfg, t)),
        DisorderKind::Cauchy => None,
    }
}

pub fn inversion_quenched_mc(
    cfg: &SingleJcConfig,
    spec: &DisorderSpec,
    plan: &QuenchPlan,
    t: f64,
) -> Result<QuenchEstimate> {
    let deltas = disorder::draw_single(spec, plan)?;
    let values: Vec<f64> = deltas
        .iter()
        .map(|&d| inversion_realization(cfg, d, t))
        .collect();
    disorder::reduce_point(&values, plan, 0)
}

/// Monte-Carlo inversion over a time grid.
pub fn inversion_quenched_series(
    cfg: &SingleJcConfig,
    spec: &DisorderSpec,
    plan: &QuenchPlan,
    times: &[f64],
) -> Result<TimeSeries> {
    let deltas = disorder::draw_single(spec, plan)?;
    let est = disorder::quench_series(times, plan, deltas.len(), |i, t| {
        inversion_realization(cfg, deltas[i], t)
    })?;
    TimeSeries::from_estimates(times.to_vec(), &est)
}

/// Closed-form series (clean when the spec is degenerate).
pub fn inversion_closed_series(
    cfg: &SingleJcConfig,
    spec: &DisorderSpec,
    times: &[f64],
) -> Result<TimeSeries> {
    if spec.kind() == DisorderKind::Cauchy && !spec.is_degenerate() {
        return Err(Error::config(
            "cauchy disorder has no closed-form average; use the median Monte-Carlo path",
        ));
    }
    let values = times
        .par_iter()
        .map(|&t| inversion_closed_form(cfg, spec, t).expect("closed form exists"))
        .collect();
    TimeSeries::exact(times.to_vec(), values)
}

/// Reduced atomic state for one realization.
pub fn atom_reduced_state(cfg: &SingleJcConfig, delta: f64, t: f64) -> Result<QubitDensity> {
    let (a, b) = atom_ab(cfg, delta, t);
    QubitDensity::from_ab(a, b)
}

/// `a = sum C_n^2 cos^2(g' sqrt(n) t)`, `b = sum C_n C_{n+1} cos(g' sqrt(n) t) sin(g' sqrt(n+1) t)`.
fn atom_ab(cfg: &SingleJcConfig, delta: f64, t: f64) -> (f64, f64) {
    let gt = cfg.g * (1.0 + delta) * t;
    let w = cfg.photons.weights();
    let n0 = cfg.photons.n_min as f64;
    let mut a = 0.0;
    let mut b = 0.0;
    let mut prev: Option<(f64, f64)> = None; // (C_n, cos) of the previous Fock index
    for (k, &wk) in w.iter().enumerate() {
        let (sin, cos) = (gt * (n0 + k as f64).sqrt()).sin_cos();
        let c = wk.sqrt();
        a += wk * cos * cos;
        if let Some((c_prev, cos_prev)) = prev {
            b += c_prev * c * cos_prev * sin;
        }
        prev = Some((c, cos));
    }
    // C_{n_min - 1} = 0, so the lowest index contributes nothing extra.
    (a.clamp(0.0, 1.0), b)
}

/// Atom-photon entanglement (bits) for one realization.
pub fn ap_entanglement(cfg: &SingleJcConfig, delta: f64, t: f64) -> Result<f64> {
    Ok(von_neumann_entropy(&atom_reduced_state(cfg, delta, t)?))
}

pub fn ap_entanglement_clean(cfg: &SingleJcConfig, t: f64) -> Result<f64> {
    ap_entanglement(cfg, 0.0, t)
}

/// Disorder average of the entanglement (never of the state).
pub fn ap_entanglement_quenched(
    cfg: &SingleJcConfig,
    spec: &DisorderSpec,
    plan: &QuenchPlan,
    t: f64,
) -> Result<QuenchEstimate> {
    let deltas = disorder::draw_single(spec, plan)?;
    let values = deltas
        .iter()
        .map(|&d| ap_entanglement(cfg, d, t))
        .collect::<Result<Vec<f64>>>()?;
    disorder::reduce_point(&values, plan, 0)
}

pub fn ap_entanglement_series(
    cfg: &SingleJcConfig,
    spec: &DisorderSpec,
    plan: &QuenchPlan,
    times: &[f64],
) -> Result<TimeSeries> {
    if spec.is_degenerate() {
        let values = times
            .par_iter()
            .map(|&t| ap_entanglement_clean(cfg, t))
            .collect::<Result<Vec<f64>>>()?;
        return TimeSeries::exact(times.to_vec(), values);
    }
    let deltas = disorder::draw_single(spec, plan)?;
    // entropies are bounded, so a failed state construction is the only error source
    let failure = std::sync::Mutex::new(None);
    let est = disorder::quench_series(times, plan, deltas.len(), |i, t| {
        ap_entanglement(cfg, deltas[i], t).unwrap_or_else(|e| {
            failure.lock().unwrap().get_or_insert(e);
            f64::NAN
        })
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    TimeSeries::from_estimates(times.to_vec(), &est?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::Estimator;

    fn cfg() -> SingleJcConfig {
        SingleJcConfig::with_field(50.0, 2.0).unwrap()
    }

    #[test]
    fn weights_shape() {
        let p = photon_weights(50.0, 2.0).unwrap();
        let sum: f64 = p.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let peak = p.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
        assert_eq!(peak, 50);
        let ratio = p.weight(52) / p.weight(50);
        assert!((ratio - (-0.5f64).exp()).abs() < 1e-12);
        assert!((p.mean_photon_number() - 50.0).abs() < 0.01);
        assert_eq!((p.n_min(), p.n_max()), (30, 70));
        assert!(p.warning().is_none());
        assert!(photon_weights(5.0, 2.0).unwrap().warning().is_some());
        assert_eq!(photon_weights(3.0, 1.0).unwrap().n_min(), 0);
        assert!(photon_weights(-1.0, 1.0).is_err());
    }

    #[test]
    fn revival_periods() {
        assert!((revival_period(&cfg()) - 44.428_829_381_583_66).abs() < 1e-10);
        let c = SingleJcConfig::new(2.0, photon_weights(100.0, 2.0).unwrap()).unwrap();
        assert!((revival_period(&c) - 10.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn inversion_at_zero_is_one() {
        let c = cfg();
        assert!((inversion_clean(&c, 0.0) - 1.0).abs() < 1e-15);
        assert!((inversion_uniform(&c, 0.1, 0.0) - 1.0).abs() < 1e-15);
        assert!((inversion_discrete(&c, 0.1, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clean_matches_brute_force() {
        // independent oracle: unnormalized Gaussian summed in reverse order
        let c = cfg();
        for &t in &[0.3, 17.0, 44.0, 300.0] {
            let (mut num, mut den) = (0.0, 0.0);
            for n in (30..=70).rev() {
                let w = (-((n as f64 - 50.0).powi(2)) / 8.0).exp();
                num += w * (2.0 * t * (n as f64).sqrt()).cos();
                den += w;
            }
            assert!((inversion_clean(&c, t) - num / den).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_disorder_is_clean() {
        let c = cfg();
        for &t in &[1.0, 44.0, 120.0] {
            let w = inversion_clean(&c, t);
            assert_eq!(inversion_gaussian(&c, 0.0, t), w);
            assert_eq!(inversion_uniform(&c, 0.0, t), w);
            assert_eq!(inversion_discrete(&c, 0.0, t), w);
        }
    }

    #[test]
    fn discrete_matches_product_form() {
        let c = cfg();
        for &t in &[3.0, 44.4, 97.0] {
            let product: f64 = c
                .photons()
                .iter()
                .map(|(n, w)| {
                    let x = 2.0 * t * (n as f64).sqrt();
                    w * x.cos() * (0.07 * x).cos()
                })
                .sum();
            // cos loses |x| * eps at large phase
            assert!((inversion_discrete(&c, 0.07, t) - product).abs() < 1e-15 * 2.0 * t * 8.0 + 1e-15);
        }
    }

    #[test]
    fn discrete_equals_two_atom_average() {
        let c = cfg();
        let spec = DisorderSpec::new(DisorderKind::Discrete, 0.07).unwrap();
        for &t in &[3.0, 44.4, 97.0] {
            let mc = inversion_quenched_mc(&c, &spec, &QuenchPlan::enumerated(), t).unwrap();
            assert!((mc.estimate - inversion_discrete(&c, 0.07, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_mc_within_three_standard_errors() {
        let c = cfg();
        let tr = revival_period(&c);
        let spec = DisorderSpec::new(DisorderKind::Gaussian, 0.001).unwrap();
        let plan = QuenchPlan::new(10_000, Estimator::Mean, 11);
        let mc = inversion_quenched_mc(&c, &spec, &plan, tr).unwrap();
        let exact = inversion_gaussian(&c, 0.001, tr);
        assert!((mc.estimate - exact).abs() < 3.0 * mc.spread, "{mc:?} vs {exact}");
    }

    #[test]
    fn reduced_state_at_zero_is_ground() {
        let rho = atom_reduced_state(&cfg(), 0.0, 0.0).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(rho.matrix()[(0, 1)].im, 0.0);
        assert_eq!(ap_entanglement_clean(&cfg(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn b_matches_direct_sum() {
        let c = cfg();
        let (t, delta) = (5.3, -0.2);
        let g = 1.0 - 0.2;
        let mut b = 0.0;
        for n in 30..70u32 {
            let (cn, cn1) = (c.photons().weight(n).sqrt(), c.photons().weight(n + 1).sqrt());
            b += cn * cn1 * (g * (n as f64).sqrt() * t).cos() * (g * ((n + 1) as f64).sqrt() * t).sin();
        }
        let (_, got) = atom_ab(&c, delta, t);
        assert!((got - b).abs() < 1e-14);
    }

    #[test]
    fn quenched_entanglement_averages_entropies() {
        let c = cfg();
        let s = 0.3;
        let spec = DisorderSpec::new(DisorderKind::Discrete, s).unwrap();
        let t = 4.0;
        let e_plus = ap_entanglement(&c, s, t).unwrap();
        let e_minus = ap_entanglement(&c, -s, t).unwrap();
        assert!((e_plus - e_minus).abs() > 1e-3);
        let got = ap_entanglement_quenched(&c, &spec, &QuenchPlan::enumerated(), t).unwrap();
        assert!((got.estimate - 0.5 * (e_plus + e_minus)).abs() < 1e-15);
    }
}
