//! Two non-interacting atom-cavity pairs, each cavity initially in vacuum.
//!
//! The `Psi` family starts from `(cos a |10> + sin a |01>) |00>` and never shows
//! sudden death; the `Phi` family starts from `(cos a |11> + sin a |00>) |00>` and
//! does for `tan a < 1`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{
    self, CompensatedSum, DisorderKind, DisorderSpec, Estimator, QuenchEstimate, QuenchPlan,
    Sampling,
};
use crate::entanglement::{TwoQubitDensity, XState};
use crate::series::{time_grid, TimeSeries};
use crate::{Error, Result, C64};

/// Concurrence at or below this value counts as dead.
pub const ESD_EPS: f64 = 1e-10;
/// Shortest zero plateau (in units of `1/g`) that counts as a death interval.
pub const ESD_MIN_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Psi,
    Phi,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Psi => "psi",
            Family::Phi => "phi",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi" => Ok(Family::Psi),
            "phi" => Ok(Family::Phi),
            other => Err(Error::config(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleJcConfig {
    alpha: f64,
    g_a: f64,
    g_b: f64,
    family: Family,
}

impl DoubleJcConfig {
    pub fn new(alpha: f64, g_a: f64, g_b: f64, family: Family) -> Result<Self> {
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&alpha) {
            return Err(Error::validation(format!("alpha must lie in [0, pi/2], got {alpha}")));
        }
        for g in [g_a, g_b] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::validation(format!("couplings must be positive, got {g}")));
            }
        }
        Ok(Self {
            alpha: alpha.min(FRAC_PI_2),
            g_a,
            g_b,
            family,
        })
    }

    /// Equal unit couplings.
    pub fn symmetric(alpha: f64, family: Family) -> Result<Self> {
        Self::new(alpha, 1.0, 1.0, family)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn g_a(&self) -> f64 {
        self.g_a
    }

    pub fn g_b(&self) -> f64 {
        self.g_b
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.g_a, self.g_b, self.family)
    }

    fn phases(&self, delta_a: f64, delta_b: f64, t: f64) -> (f64, f64) {
        (
            self.g_a * (1.0 + delta_a) * t,
            self.g_b * (1.0 + delta_b) * t,
        )
    }
}

/// `(|c_A c_B|, 2 |s_A c_A s_B c_B|)` for phases `x_a`, `x_b`.
#[inline]
fn phi_terms(xa: f64, xb: f64) -> (f64, f64) {
    let (sa, ca) = xa.sin_cos();
    let (sb, cb) = xb.sin_cos();
    let x = (ca * cb).abs();
    (x, 2.0 * (sa * sb).abs() * x)
}

/// `max(0, sin 2a * X - cos^2 a * Y)`.
#[inline]
fn phi_value(sin2a: f64, cos2a: f64, x: f64, y: f64) -> f64 {
    (sin2a * x - cos2a * y).clamp(0.0, 1.0)
}

/// Concurrence for one disorder realization; couplings become `g (1 + delta)`.
pub fn concurrence_realization(cfg: &DoubleJcConfig, delta_a: f64, delta_b: f64, t: f64) -> f64 {
    let (xa, xb) = cfg.phases(delta_a, delta_b, t);
    let sin2a = (2.0 * cfg.alpha).sin();
    match cfg.family {
        Family::Psi => (sin2a * xa.cos() * xb.cos()).abs().min(1.0),
        Family::Phi => {
            let (x, y) = phi_terms(xa, xb);
            phi_value(sin2a, cfg.alpha.cos().powi(2), x, y)
        }
    }
}

pub fn concurrence_clean(cfg: &DoubleJcConfig, t: f64) -> f64 {
    concurrence_realization(cfg, 0.0, 0.0, t)
}

/// Atomic vectors conditioned on each cavity occupation after evolution.
fn branches(cfg: &DoubleJcConfig, delta_a: f64, delta_b: f64, t: f64) -> Vec<Vector4<C64>> {
    let (xa, xb) = cfg.phases(delta_a, delta_b, t);
    let (sa, ca) = xa.sin_cos();
    let (sb, cb) = xb.sin_cos();
    let (s, c) = cfg.alpha.sin_cos();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let z = C64::new(0.0, 0.0);
    match cfg.family {
        Family::Psi => vec![
            Vector4::new(z, re(c * ca), re(s * cb), z),
            Vector4::new(z, z, z, im(-c * sa)),
            Vector4::new(z, z, z, im(-s * sb)),
        ],
        Family::Phi => vec![
            Vector4::new(re(c * ca * cb), z, z, re(s)),
            Vector4::new(z, im(-c * ca * sb), z, z),
            Vector4::new(z, z, im(-c * sa * cb), z),
            Vector4::new(z, z, z, re(-c * sa * sb)),
        ],
    }
}

/// Explicit two-atom density matrix for one realization.
pub fn realization_density(
    cfg: &DoubleJcConfig,
    delta_a: f64,
    delta_b: f64,
    t: f64,
) -> Result<TwoQubitDensity> {
    TwoQubitDensity::from_branches(branches(cfg, delta_a, delta_b, t))
}

/// The same state in X form.
pub fn realization_xstate(
    cfg: &DoubleJcConfig,
    delta_a: f64,
    delta_b: f64,
    t: f64,
) -> Result<XState> {
    let (xa, xb) = cfg.phases(delta_a, delta_b, t);
    let (sa, ca) = xa.sin_cos();
    let (sb, cb) = xb.sin_cos();
    let (s, c) = cfg.alpha.sin_cos();
    let zero = C64::new(0.0, 0.0);
    match cfg.family {
        Family::Psi => {
            let a = c * c * ca * ca;
            let b = s * s * cb * cb;
            XState::new([0.0, a, b, 1.0 - a - b], zero, C64::new(c * s * ca * cb, 0.0))
        }
        Family::Phi => {
            let e = c * c * ca * ca * cb * cb;
            let f = c * c * ca * ca * sb * sb;
            let g = c * c * sa * sa * cb * cb;
            let rest = c * c * sa * sa * sb * sb + s * s;
            XState::new([e, f, g, rest], C64::new(c * s * ca * cb, 0.0), zero)
        }
    }
}

/// Quenched concurrence at a single time.
pub fn concurrence_quenched(
    cfg: &DoubleJcConfig,
    spec_a: &DisorderSpec,
    spec_b: &DisorderSpec,
    plan: &QuenchPlan,
    t: f64,
) -> Result<QuenchEstimate> {
    let (da, db) = disorder::draw_pairs(spec_a, spec_b, plan)?;
    let values: Vec<f64> = da
        .iter()
        .zip(&db)
        .map(|(&a, &b)| concurrence_realization(cfg, a, b, t))
        .collect();
    disorder::reduce_point(&values, plan, 0)
}

/// Quenched concurrence over a time grid; exact clean values when both specs are degenerate.
pub fn concurrence_quenched_series(
    cfg: &DoubleJcConfig,
    spec_a: &DisorderSpec,
    spec_b: &DisorderSpec,
    plan: &QuenchPlan,
    times: &[f64],
) -> Result<TimeSeries> {
    plan.validate_for(&[*spec_a, *spec_b])?;
    if spec_a.is_degenerate() && spec_b.is_degenerate() {
        let values = times.par_iter().map(|&t| concurrence_clean(cfg, t)).collect();
        return TimeSeries::exact(times.to_vec(), values);
    }
    let (da, db) = disorder::draw_pairs(spec_a, spec_b, plan)?;
    let est = disorder::quench_series(times, plan, da.len(), |i, t| {
        concurrence_realization(cfg, da[i], db[i], t)
    })?;
    TimeSeries::from_estimates(times.to_vec(), &est)
}

/// Death intervals and touch points of a concurrence series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsdReport {
    /// `(first dead sample, last dead sample)` of each qualifying plateau.
    pub death_intervals: Vec<(f64, f64)>,
    /// Midpoints of dips too short to count as intervals.
    pub touch_points: Vec<f64>,
    /// Dead runs touching either end of the series; neither intervals nor touch points.
    pub open_runs: Vec<(f64, f64)>,
    pub horizon: f64,
}

impl EsdReport {
    pub fn has_esd(&self) -> bool {
        !self.death_intervals.is_empty()
    }
}

/// Classifies maximal runs of `value <= eps`.
///
/// A run flanked by live samples on both sides is a death interval when
/// `t_last - t_first >= min_gap`, otherwise a touch point.
pub fn detect_esd(series: &TimeSeries, eps: f64, min_gap: f64) -> Result<EsdReport> {
    if !(min_gap > 0.0) || !(eps >= 0.0) {
        return Err(Error::validation("ESD thresholds must be positive"));
    }
    let dt = series
        .uniform_step()
        .ok_or_else(|| Error::validation("ESD detection needs a uniform grid of >= 2 points"))?;
    if dt > min_gap / 10.0 * (1.0 + 1e-9) {
        return Err(Error::validation(format!(
            "grid step {dt} coarser than min_gap / 10 = {}",
            min_gap / 10.0
        )));
    }
    let (t, v) = (series.t(), series.value());
    let n = t.len();
    let mut report = EsdReport {
        death_intervals: Vec::new(),
        touch_points: Vec::new(),
        open_runs: Vec::new(),
        horizon: t[n - 1],
    };
    let mut k = 0;
    while k < n {
        if v[k] > eps {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && v[k] <= eps {
            k += 1;
        }
        let end = k - 1;
        let (t0, t1) = (t[start], t[end]);
        if start == 0 || end == n - 1 {
            report.open_runs.push((t0, t1));
        } else if t1 - t0 >= min_gap - 1e-12 {
            report.death_intervals.push((t0, t1));
        } else {
            report.touch_points.push(0.5 * (t0 + t1));
        }
    }
    Ok(report)
}

/// `lo, lo + step, ...` up to `hi` (kept when within rounding).
pub fn grid_axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::validation(format!("bad grid {lo}:{hi}:{step}")));
    }
    let k = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| lo + i as f64 * step).collect())
}

/// Axes of an ESD-persistence scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub strengths_a: Vec<f64>,
    pub strengths_b: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl RegionGrid {
    /// Same strength axis for both atoms.
    pub fn square(strengths: Vec<f64>, alphas: Vec<f64>) -> Self {
        Self {
            strengths_a: strengths.clone(),
            strengths_b: strengths,
            alphas,
        }
    }

    pub fn cells(&self) -> usize {
        self.strengths_a.len() * self.strengths_b.len() * self.alphas.len()
    }
}

/// Everything except the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionScanConfig {
    pub kind: DisorderKind,
    pub g: f64,
    pub plan: QuenchPlan,
    pub horizon: f64,
    pub dt: f64,
    pub eps: f64,
    pub min_gap: f64,
}

impl RegionScanConfig {
    /// `gt in [0, 25]`, step 0.005, unit coupling.
    pub fn new(kind: DisorderKind, plan: QuenchPlan) -> Self {
        Self {
            kind,
            g: 1.0,
            plan,
            horizon: 25.0,
            dt: 0.005,
            eps: ESD_EPS,
            min_gap: ESD_MIN_GAP,
        }
    }
}

/// `values[(ia * nb + ib) * nalpha + k]` is true where the quenched phi-family
/// series has at least one death interval within the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionField {
    pub grid: RegionGrid,
    pub config: RegionScanConfig,
    pub values: Vec<bool>,
}

impl RegionField {
    pub fn get(&self, ia: usize, ib: usize, k: usize) -> bool {
        let nb = self.grid.strengths_b.len();
        let na = self.grid.alphas.len();
        self.values[(ia * nb + ib) * na + k]
    }

    pub fn fraction_true(&self) -> f64 {
        self.values.iter().filter(|&&b| b).count() as f64 / self.values.len() as f64
    }
}

/// Incremental form of [`detect_esd`] over a live/dead stream.
#[derive(Debug, Clone, Copy, Default)]
struct EsdTracker {
    alive_seen: bool,
    run: Option<(f64, f64)>,
    found: bool,
}

impl EsdTracker {
    fn push(&mut self, t: f64, dead: bool, min_gap: f64) {
        if dead {
            self.run = Some(match self.run {
                Some((t0, _)) => (t0, t),
                None => (t, t),
            });
            return;
        }
        if let Some((t0, t1)) = self.run.take() {
            if self.alive_seen && t1 - t0 >= min_gap - 1e-12 {
                self.found = true;
            }
        }
        self.alive_seen = true;
    }
}

/// Whether the quenched average of non-negative `values` is `<= eps`, with early exits.
fn quenched_dead(
    estimator: Estimator,
    eps: f64,
    n: usize,
    mut value: impl FnMut(usize) -> f64,
) -> bool {
    match estimator {
        Estimator::Mean => {
            let limit = n as f64 * eps * (1.0 + 1e-9);
            let mut plain = 0.0;
            let mut sum = CompensatedSum::default();
            for i in 0..n {
                let v = value(i);
                plain += v;
                sum.add(v);
                if plain > limit {
                    return false;
                }
            }
            sum.value() / n as f64 <= eps
        }
        Estimator::Median => {
            // order statistics (n - 1) / 2 and n / 2 (0-based)
            let (mut le, mut gt) = (0usize, 0usize);
            let (mut max_le, mut min_gt) = (f64::NEG_INFINITY, f64::INFINITY);
            let need = n / 2 + 1;
            for i in 0..n {
                let v = value(i);
                if v <= eps {
                    le += 1;
                    max_le = max_le.max(v);
                    if le >= need {
                        return true;
                    }
                } else {
                    gt += 1;
                    min_gt = min_gt.min(v);
                    if gt >= need {
                        return false;
                    }
                }
            }
            if n % 2 == 1 {
                le > n / 2
            } else {
                // exactly n / 2 on each side
                0.5 * (max_le + min_gt) <= eps
            }
        }
    }
}

/// Marks grid cells where the quenched phi-family concurrence shows sudden death.
///
/// Each strength pair marches one time grid for all alphas together, sharing
/// the per-realization trig values, and stops once every alpha is decided.
/// Agrees with [`detect_esd`] applied to [`concurrence_quenched_series`].
pub fn esd_region_scan(grid: &RegionGrid, cfg: &RegionScanConfig) -> Result<RegionField> {
    if grid.cells() == 0 {
        return Err(Error::validation("empty region grid"));
    }
    if cfg.dt > cfg.min_gap / 10.0 * (1.0 + 1e-9) {
        return Err(Error::validation(format!(
            "scan step {} coarser than min_gap / 10",
            cfg.dt
        )));
    }
    let mut specs = Vec::new();
    for &s in grid.strengths_a.iter().chain(&grid.strengths_b) {
        specs.push(DisorderSpec::new(cfg.kind, s)?);
    }
    cfg.plan.validate_for(&specs)?;
    if cfg.plan.sampling == Sampling::Enumerate {
        return Err(Error::config("region scans use random sampling"));
    }
    for &a in &grid.alphas {
        DoubleJcConfig::new(a, cfg.g, cfg.g, Family::Phi)?;
    }
    let times = time_grid(cfg.horizon, cfg.dt)?;
    let n = cfg.plan.samples;
    let seed = cfg.plan.master_seed;
    let unit_a: Vec<f64> = (0..n)
        .map(|i| disorder::unit_draw(cfg.kind, seed, disorder::lane::A, i))
        .collect();
    let unit_b: Vec<f64> = (0..n)
        .map(|i| disorder::unit_draw(cfg.kind, seed, disorder::lane::B, i))
        .collect();

    let pairs: Vec<(f64, f64)> = grid
        .strengths_a
        .iter()
        .flat_map(|&a| grid.strengths_b.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<Vec<bool>> = pairs
        .par_iter()
        .map(|&(sa, sb)| {
            let spec_a = DisorderSpec::new(cfg.kind, sa).expect("validated");
            let spec_b = DisorderSpec::new(cfg.kind, sb).expect("validated");
            let (da, db): (Vec<f64>, Vec<f64>) = if sa == 0.0 && sb == 0.0 {
                (vec![0.0], vec![0.0])
            } else {
                (
                    unit_a.iter().map(|&u| spec_a.scale(u)).collect(),
                    unit_b.iter().map(|&u| spec_b.scale(u)).collect(),
                )
            };
            scan_cell(&grid.alphas, cfg, &times, &da, &db)
        })
        .collect();
    Ok(RegionField {
        grid: grid.clone(),
        config: *cfg,
        values: rows.into_iter().flatten().collect(),
    })
}

fn scan_cell(alphas: &[f64], cfg: &RegionScanConfig, times: &[f64], da: &[f64], db: &[f64]) -> Vec<bool> {
    let n = da.len();
    let coeffs: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| ((2.0 * a).sin(), a.cos().powi(2)))
        .collect();
    let mut trackers = vec![EsdTracker::default(); alphas.len()];
    let mut active: Vec<usize> = (0..alphas.len()).collect();
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let estimator = if n == 1 { Estimator::Mean } else { cfg.plan.estimator };
    for &t in times {
        if active.is_empty() {
            break;
        }
        for i in 0..n {
            let (x, y) = phi_terms(cfg.g * (1.0 + da[i]) * t, cfg.g * (1.0 + db[i]) * t);
            xs[i] = x;
            ys[i] = y;
        }
        for &k in &active {
            let (s2, c2) = coeffs[k];
            let dead = quenched_dead(estimator, cfg.eps, n, |i| phi_value(s2, c2, xs[i], ys[i]));
            trackers[k].push(t, dead, cfg.min_gap);
        }
        active.retain(|&k| !trackers[k].found);
    }
    trackers.iter().map(|tr| tr.found).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence_general;
    use std::f64::consts::PI;

    fn phi(alpha: f64) -> DoubleJcConfig {
        DoubleJcConfig::symmetric(alpha, Family::Phi).unwrap()
    }

    #[test]
    fn initial_concurrence() {
        for fam in [Family::Psi, Family::Phi] {
            let c = DoubleJcConfig::symmetric(PI / 6.0, fam).unwrap();
            assert!((concurrence_clean(&c, 0.0) - 3f64.sqrt() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_factorizes_for_equal_couplings() {
        for alpha in [0.1, PI / 6.0, PI / 4.0, 1.2] {
            let c = phi(alpha);
            for k in 0..5000 {
                let t = k as f64 * 0.005;
                let (s, cg) = t.sin_cos();
                let f = cg * cg * ((2.0 * alpha).sin() - 2.0 * alpha.cos().powi(2) * s * s).max(0.0);
                assert!((concurrence_clean(&c, t) - f).abs() < 1e-12);
            }
        }
        let c = phi(PI / 4.0);
        assert!((concurrence_clean(&c, 0.7) - 0.7f64.cos().powi(4)).abs() < 1e-15);
    }

    #[test]
    fn realization_matches_matrix_oracle() {
        for fam in [Family::Psi, Family::Phi] {
            let c = DoubleJcConfig::new(PI / 6.0, 0.9, 1.0, fam).unwrap();
            for &(da, db, t) in &[(0.0, 0.0, 0.4), (0.1, -0.3, 2.0), (-1.7, 0.4, 7.3), (3.0, 0.02, 11.1)] {
                let closed = concurrence_realization(&c, da, db, t);
                let rho = realization_density(&c, da, db, t).unwrap();
                let general = concurrence_general(&rho).unwrap();
                assert!((closed - general).abs() < 1e-10, "{fam} {closed} vs {general}");
                let x = realization_xstate(&c, da, db, t).unwrap();
                assert!((x.to_matrix() - rho.matrix()).norm() < 1e-14);
                assert!((x.concurrence() - closed).abs() < 1e-12);
            }
        }
    }

    fn clean_report(alpha: f64, fam: Family) -> EsdReport {
        let c = DoubleJcConfig::symmetric(alpha, fam).unwrap();
        let t = time_grid(25.0, 0.005).unwrap();
        let v = t.iter().map(|&t| concurrence_clean(&c, t)).collect();
        detect_esd(&TimeSeries::exact(t, v).unwrap(), ESD_EPS, ESD_MIN_GAP).unwrap()
    }

    #[test]
    fn clean_esd_intervals() {
        let r = clean_report(PI / 6.0, Family::Phi);
        let t0 = (PI / 6.0).tan().sqrt().asin();
        let (a, b) = r.death_intervals[0];
        assert!(a >= t0 && a - t0 <= 0.005, "{a}");
        assert!(b <= PI - t0 && PI - t0 - b <= 0.005, "{b}");
        assert!((t0 - 0.863_060_331_147_336_7).abs() < 1e-12);
        assert_eq!(r.death_intervals.len(), 8);
        assert!(!clean_report(PI / 4.0, Family::Phi).has_esd());
        assert!(!clean_report(PI / 3.0, Family::Phi).has_esd());
        let psi = clean_report(PI / 6.0, Family::Psi);
        assert!(!psi.has_esd());
    }

    #[test]
    fn detector_rules() {
        let t = time_grid(1.0, 0.005).unwrap();
        let mk = |f: &dyn Fn(f64) -> f64| {
            TimeSeries::exact(t.clone(), t.iter().map(|&x| f(x)).collect()).unwrap()
        };
        // short dip: touch point
        let s = mk(&|x| if (0.5..0.52).contains(&x) { 0.0 } else { 1.0 });
        let r = detect_esd(&s, ESD_EPS, ESD_MIN_GAP).unwrap();
        assert!(r.death_intervals.is_empty());
        assert_eq!(r.touch_points.len(), 1);
        // dead from the start: not an interval
        let s = mk(&|x| if x < 0.3 { 0.0 } else { 1.0 });
        let r = detect_esd(&s, ESD_EPS, ESD_MIN_GAP).unwrap();
        assert!(r.death_intervals.is_empty() && r.open_runs.len() == 1);
        // coarse grid rejected
        let coarse = TimeSeries::exact(time_grid(1.0, 0.01).unwrap(), vec![1.0; 101]).unwrap();
        assert!(detect_esd(&coarse, ESD_EPS, ESD_MIN_GAP).is_err());
    }

    #[test]
    fn quenched_zero_strength_is_clean() {
        let c = phi(PI / 6.0);
        let z = DisorderSpec::clean();
        let plan = QuenchPlan::new(50, Estimator::Mean, 3);
        let q = concurrence_quenched(&c, &z, &z, &plan, 1.3).unwrap();
        assert!((q.estimate - concurrence_clean(&c, 1.3)).abs() < 1e-15);
    }

    #[test]
    fn region_scan_matches_series_detection() {
        let alphas = vec![0.2, PI / 6.0, 0.7, PI / 3.0];
        let strengths = vec![0.0, 0.1, 0.4];
        for (kind, est) in [
            (DisorderKind::Gaussian, Estimator::Mean),
            (DisorderKind::Uniform, Estimator::Mean),
            (DisorderKind::Cauchy, Estimator::Median),
            (DisorderKind::Discrete, Estimator::Median),
        ] {
            let mut scfg = RegionScanConfig::new(kind, QuenchPlan::new(64, est, 9));
            scfg.horizon = 12.0;
            let grid = RegionGrid::square(strengths.clone(), alphas.clone());
            let field = esd_region_scan(&grid, &scfg).unwrap();
            let times = time_grid(scfg.horizon, scfg.dt).unwrap();
            for (ia, &sa) in strengths.iter().enumerate() {
                for (ib, &sb) in strengths.iter().enumerate() {
                    for (k, &alpha) in alphas.iter().enumerate() {
                        let spec_a = DisorderSpec::new(kind, sa).unwrap();
                        let spec_b = DisorderSpec::new(kind, sb).unwrap();
                        let series =
                            concurrence_quenched_series(&phi(alpha), &spec_a, &spec_b, &scfg.plan, &times)
                                .unwrap();
                        let r = detect_esd(&series, scfg.eps, scfg.min_gap).unwrap();
                        assert_eq!(field.get(ia, ib, k), r.has_esd(), "{kind} {sa} {sb} {alpha}");
                    }
                }
            }
        }
    }

    #[test]
    fn median_even_count_uses_midpoint() {
        // two dead, two alive: median = (max_le + min_gt) / 2
        let v = [0.0, 1e-11, 3e-10, 1.0];
        assert!(!quenched_dead(Estimator::Median, 1e-10, 4, |i| v[i]));
        let v = [0.0, 0.0, 1.5e-10, 1.0];
        assert!(quenched_dead(Estimator::Median, 1e-10, 4, |i| v[i]));
    }
}
