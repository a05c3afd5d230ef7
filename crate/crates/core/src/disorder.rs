//! Disorder distributions, deterministic sampling, and quenched averaging.
//!
//! Every distribution is parameterized by a single non-negative `strength`:
//! the standard deviation for gaussian, uniform and discrete disorder, and the
//! semi-interquartile range (equal to the scale) for Cauchy-Lorentz disorder.
//! All four kinds are scale families, so a draw is `strength * unit_draw`.
//!
//! Realization `i` on lane `l` always uses the ChaCha8 stream keyed by
//! `(master_seed, l, i)`, so averages do not depend on thread count or on the
//! order in which realizations are evaluated.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Third quartile of the standard normal distribution.
pub const NORMAL_Q3: f64 = 0.674_489_750_196_081_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderKind {
    Gaussian,
    Uniform,
    Discrete,
    Cauchy,
}

impl DisorderKind {
    pub const ALL: [DisorderKind; 4] = [
        DisorderKind::Gaussian,
        DisorderKind::Uniform,
        DisorderKind::Discrete,
        DisorderKind::Cauchy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DisorderKind::Gaussian => "gaussian",
            DisorderKind::Uniform => "uniform",
            DisorderKind::Discrete => "discrete",
            DisorderKind::Cauchy => "cauchy",
        }
    }

    /// Mean is undefined for Cauchy-Lorentz disorder.
    pub fn default_estimator(self) -> Estimator {
        match self {
            DisorderKind::Cauchy => Estimator::Median,
            _ => Estimator::Mean,
        }
    }

    /// One draw from the unit-strength member of the family.
    pub fn unit_draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            DisorderKind::Gaussian => StandardNormal.sample(rng),
            DisorderKind::Uniform => 3f64.sqrt() * rng.random_range(-1.0..=1.0),
            DisorderKind::Discrete => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DisorderKind::Cauchy => {
                // inverse CDF; u in (0, 1) keeps the tangent finite
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                (std::f64::consts::PI * (u - 0.5)).tan()
            }
        }
    }
}

impl fmt::Display for DisorderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisorderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(DisorderKind::Gaussian),
            "uniform" => Ok(DisorderKind::Uniform),
            "discrete" => Ok(DisorderKind::Discrete),
            "cauchy" | "lorentz" | "cauchy-lorentz" => Ok(DisorderKind::Cauchy),
            other => Err(Error::config(format!("unknown disorder kind `{other}`"))),
        }
    }
}

/// A disorder distribution with its strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    kind: DisorderKind,
    strength: f64,
}

impl DisorderSpec {
    pub fn new(kind: DisorderKind, strength: f64) -> Result<Self> {
        if !strength.is_finite() || strength < 0.0 {
            return Err(Error::validation(format!(
                "disorder strength must be finite and non-negative, got {strength}"
            )));
        }
        Ok(Self { kind, strength })
    }

    /// The degenerate distribution `delta = 0`.
    pub fn clean() -> Self {
        Self {
            kind: DisorderKind::Gaussian,
            strength: 0.0,
        }
    }

    pub fn kind(&self) -> DisorderKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn is_degenerate(&self) -> bool {
        self.strength == 0.0
    }

    /// Same kind at a different strength.
    pub fn with_strength(&self, strength: f64) -> Result<Self> {
        Self::new(self.kind, strength)
    }

    /// Half-width of the support; infinite for unbounded kinds.
    pub fn support_half_width(&self) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        match self.kind {
            DisorderKind::Uniform => 3f64.sqrt() * self.strength,
            DisorderKind::Discrete => self.strength,
            DisorderKind::Gaussian | DisorderKind::Cauchy => f64::INFINITY,
        }
    }

    /// Atoms `(value, probability)` of the discrete kind, ascending.
    pub fn atoms(&self) -> Option<[(f64, f64); 2]> {
        match self.kind {
            DisorderKind::Discrete => Some([(-self.strength, 0.5), (self.strength, 0.5)]),
            _ => None,
        }
    }

    /// Map a unit draw to this distribution.
    pub fn scale(&self, unit: f64) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            self.strength * unit
        }
    }
}

impl fmt::Display for DisorderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.strength)
    }
}

/// Parses `kind:strength`, e.g. `gaussian:0.1`. A bare `clean` is strength zero.
impl FromStr for DisorderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("clean") || s.eq_ignore_ascii_case("none") {
            return Ok(Self::clean());
        }
        let (kind, strength) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("expected `kind:strength`, got `{s}`")))?;
        let strength: f64 = strength
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad disorder strength `{strength}`")))?;
        Self::new(kind.parse()?, strength).map_err(|e| Error::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn semi_interquartile_range(&self) -> f64 {
        0.5 * (self.q3 - self.q1)
    }
}

/// Analytic quartiles of the distribution.
pub fn distribution_quartiles(spec: &DisorderSpec) -> Quartiles {
    let s = spec.strength;
    let q3 = match spec.kind {
        DisorderKind::Gaussian => NORMAL_Q3 * s,
        DisorderKind::Uniform => 0.5 * spec.support_half_width(),
        DisorderKind::Cauchy => s,
        DisorderKind::Discrete => {
            let atoms = spec.atoms().expect("discrete has atoms");
            return Quartiles {
                q1: discrete_quantile(&atoms, 0.25),
                median: discrete_quantile(&atoms, 0.5),
                q3: discrete_quantile(&atoms, 0.75),
            };
        }
    };
    Quartiles {
        q1: -q3,
        median: 0.0,
        q3,
    }
}

/// Quantile of a discrete distribution given as ascending `(value, probability)` atoms.
///
/// When the cumulative probability equals `p` exactly at atom `r`, the quantile is
/// the midpoint of atoms `r` and `r + 1`; otherwise it is the first atom whose
/// cumulative probability exceeds `p`.
pub fn discrete_quantile(atoms: &[(f64, f64)], p: f64) -> f64 {
    let mut cumulative = 0.0;
    for (r, &(value, prob)) in atoms.iter().enumerate() {
        cumulative += prob;
        if (cumulative - p).abs() < 1e-12 {
            return match atoms.get(r + 1) {
                Some(&(next, _)) => 0.5 * (value + next),
                None => value,
            };
        }
        if cumulative > p {
            return value;
        }
    }
    atoms.last().map(|a| a.0).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mean,
    Median,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Mean => "mean",
            Estimator::Median => "median",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Estimator::Mean),
            "median" => Ok(Estimator::Median),
            other => Err(Error::config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// How realizations are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// `samples` independent random draws.
    Random,
    /// Every atom of a discrete distribution exactly once (product over lanes).
    Enumerate,
}

/// Monte-Carlo averaging policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchPlan {
    pub samples: usize,
    pub estimator: Estimator,
    pub master_seed: u64,
    /// Relative spread below which an estimate counts as converged.
    pub rel_tol: f64,
    /// Bootstrap resamples for the median spread; zero selects the IQR formula.
    pub bootstrap_resamples: usize,
    pub sampling: Sampling,
}

impl Default for QuenchPlan {
    fn default() -> Self {
        Self {
            samples: 5000,
            estimator: Estimator::Mean,
            master_seed: 0x5EED,
            rel_tol: 1e-2,
            bootstrap_resamples: 100,
            sampling: Sampling::Random,
        }
    }
}

impl QuenchPlan {
    pub fn new(samples: usize, estimator: Estimator, master_seed: u64) -> Self {
        Self {
            samples,
            estimator,
            master_seed,
            ..Self::default()
        }
    }

    /// Default plan with the estimator the disorder kind requires.
    pub fn for_kind(kind: DisorderKind, samples: usize, master_seed: u64) -> Self {
        Self::new(samples, kind.default_estimator(), master_seed)
    }

    pub fn enumerated() -> Self {
        Self {
            sampling: Sampling::Enumerate,
            ..Self::default()
        }
    }

    pub fn with_bootstrap(mut self, resamples: usize) -> Self {
        self.bootstrap_resamples = resamples;
        self
    }

    /// Checks the plan against every disorder spec it will be used with.
    pub fn validate_for(&self, specs: &[DisorderSpec]) -> Result<()> {
        if self.samples == 0 && self.sampling == Sampling::Random {
            return Err(Error::config("quench plan needs at least one sample"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::config("rel_tol must be positive"));
        }
        for spec in specs {
            if spec.kind == DisorderKind::Cauchy
                && !spec.is_degenerate()
                && self.estimator == Estimator::Mean
            {
                return Err(Error::config(
                    "cauchy disorder has no mean; use the median estimator",
                ));
            }
            if self.sampling == Sampling::Enumerate
                && spec.kind != DisorderKind::Discrete
                && !spec.is_degenerate()
            {
                return Err(Error::config(format!(
                    "enumerated sampling needs discrete disorder, got {}",
                    spec.kind
                )));
            }
        }
        Ok(())
    }
}

/// Stream lanes: independent families of streams under one master seed.
pub mod lane {
    pub const A: u64 = 0;
    pub const B: u64 = 1;
    pub const BOOTSTRAP: u64 = 0xB007;
}

/// The RNG for realization `index` on `lane`.
pub fn stream(master_seed: u64, lane: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&lane.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Unit draw for realization `i` on `lane`; scale with [`DisorderSpec::scale`].
pub fn unit_draw(kind: DisorderKind, master_seed: u64, lane: u64, i: usize) -> f64 {
    kind.unit_draw(&mut stream(master_seed, lane, i as u64))
}

/// The disorder value of realization `i` (lane A).
///
/// Panics if `i` is outside the plan.
pub fn sample_delta(spec: &DisorderSpec, plan: &QuenchPlan, i: usize) -> f64 {
    sample_delta_lane(spec, plan, lane::A, i)
}

pub fn sample_delta_lane(spec: &DisorderSpec, plan: &QuenchPlan, lane: u64, i: usize) -> f64 {
    if let (Sampling::Enumerate, Some(atoms)) = (plan.sampling, spec.atoms()) {
        assert!(i < atoms.len(), "realization {i} outside enumerated atoms");
        return atoms[i].0;
    }
    assert!(
        i < plan.samples,
        "realization {i} outside plan of {}",
        plan.samples
    );
    spec.scale(unit_draw(spec.kind, plan.master_seed, lane, i))
}

/// All lane-A draws of a plan.
pub fn draw_single(spec: &DisorderSpec, plan: &QuenchPlan) -> Result<Vec<f64>> {
    plan.validate_for(&[*spec])?;
    let n = match plan.sampling {
        Sampling::Enumerate => spec.atoms().map_or(1, |a| a.len()),
        Sampling::Random => plan.samples,
    };
    Ok((0..n).map(|i| sample_delta(spec, plan, i)).collect())
}

/// Paired independent draws `(delta_a[i], delta_b[i])`.
///
/// Lane A and lane B streams are distinct, so the two couplings are independent.
/// Enumerated plans produce the full product of the two atom sets.
pub fn draw_pairs(
    spec_a: &DisorderSpec,
    spec_b: &DisorderSpec,
    plan: &QuenchPlan,
) -> Result<(Vec<f64>, Vec<f64>)> {
    plan.validate_for(&[*spec_a, *spec_b])?;
    match plan.sampling {
        Sampling::Random => {
            let a = (0..plan.samples)
                .map(|i| sample_delta_lane(spec_a, plan, lane::A, i))
                .collect();
            let b = (0..plan.samples)
                .map(|i| sample_delta_lane(spec_b, plan, lane::B, i))
                .collect();
            Ok((a, b))
        }
        Sampling::Enumerate => {
            let atoms = |s: &DisorderSpec| -> Vec<f64> {
                s.atoms()
                    .map(|a| a.iter().map(|x| x.0).collect())
                    .unwrap_or_else(|| vec![0.0])
            };
            let (aa, bb) = (atoms(spec_a), atoms(spec_b));
            let mut a = Vec::with_capacity(aa.len() * bb.len());
            let mut b = Vec::with_capacity(aa.len() * bb.len());
            for &x in &aa {
                for &y in &bb {
                    a.push(x);
                    b.push(y);
                }
            }
            Ok((a, b))
        }
    }
}

/// A quenched estimate and its spread (standard error for the mean,
/// median spread for the median, zero for exact values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchEstimate {
    pub estimate: f64,
    pub spread: f64,
}

impl QuenchEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            estimate: value,
            spread: 0.0,
        }
    }

    pub fn is_converged(&self, rel_tol: f64) -> bool {
        self.spread <= rel_tol * self.estimate.abs().max(f64::MIN_POSITIVE)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Median of an ascending slice; the midpoint of the two central values for even length.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Linear-interpolation sample quantile of an ascending slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean_estimate(values: &[f64]) -> QuenchEstimate {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    if values.len() < 2 {
        return QuenchEstimate::exact(mean);
    }
    let ss = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .collect::<CompensatedSum>()
        .value();
    QuenchEstimate {
        estimate: mean,
        spread: (ss / (n - 1.0)).sqrt() / n.sqrt(),
    }
}

/// IQR-based standard error of the median (exact for normal samples as N grows).
fn median_estimate(sorted: &[f64]) -> QuenchEstimate {
    let n = sorted.len() as f64;
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let sigma = iqr / (2.0 * NORMAL_Q3);
    QuenchEstimate {
        estimate: median_sorted(sorted),
        spread: sigma * (std::f64::consts::FRAC_PI_2).sqrt() / n.sqrt(),
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(
            "quenched average over zero realizations (misconfigured plan)",
        ));
    }
    if let Some(bad) = values.iter().find(|v| v.is_nan()) {
        return Err(Error::numerical(
            format!("non-numeric realization value {bad}"),
            None,
        ));
    }
    Ok(())
}

/// Mean with standard error, or median with an IQR-based spread.
pub fn quench_average(values: &[f64], estimator: Estimator) -> Result<QuenchEstimate> {
    check_values(values)?;
    Ok(match estimator {
        Estimator::Mean => mean_estimate(values),
        Estimator::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            median_estimate(&sorted)
        }
    })
}

/// Standard deviation of medians over bootstrap resamples.
pub fn bootstrap_median_spread<R: Rng + ?Sized>(
    values: &[f64],
    resamples: usize,
    rng: &mut R,
) -> f64 {
    let n = values.len();
    if n < 2 || resamples < 2 {
        return 0.0;
    }
    let mut buf = vec![0.0; n];
    let medians: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..n)];
            }
            select_median(&mut buf)
        })
        .collect();
    let mean = medians.iter().copied().collect::<CompensatedSum>().value() / resamples as f64;
    let var = medians
        .iter()
        .map(|m| (m - mean) * (m - mean))
        .collect::<CompensatedSum>()
        .value()
        / (resamples - 1) as f64;
    var.sqrt()
}

fn select_median(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let (_, upper, _) = buf.select_nth_unstable_by(n / 2, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = buf[..n / 2]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Reduction used by the series engines: the plan's estimator, with a
/// bootstrap median spread seeded by `(master_seed, BOOTSTRAP, point)`.
pub fn reduce_point(values: &[f64], plan: &QuenchPlan, point: usize) -> Result<QuenchEstimate> {
    let mut est = quench_average(values, plan.estimator)?;
    if plan.estimator == Estimator::Median && plan.bootstrap_resamples > 0 {
        let mut rng = stream(plan.master_seed, lane::BOOTSTRAP, point as u64);
        est.spread = bootstrap_median_spread(values, plan.bootstrap_resamples, &mut rng);
    }
    Ok(est)
}

/// Quenched average of `observable(realization, t)` at every time.
///
/// Parallel over time points; each point reduces its realizations in index
/// order, so the result is independent of the worker count.
pub fn quench_series<F>(
    times: &[f64],
    plan: &QuenchPlan,
    realizations: usize,
    observable: F,
) -> Result<Vec<QuenchEstimate>>
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    if realizations == 0 {
        return Err(Error::config("quench plan produced no realizations"));
    }
    times
        .par_iter()
        .enumerate()
        .map_init(
            || Vec::with_capacity(realizations),
            |buf, (k, &t)| {
                buf.clear();
                buf.extend((0..realizations).map(|i| observable(i, t)));
                reduce_point(buf, plan, k)
            },
        )
        .collect()
}

/// Quenched average when each realization yields a whole series at once
/// (`rows[i][k]` is realization `i` at time point `k`).
pub fn reduce_rows(rows: &[Vec<f64>], plan: &QuenchPlan) -> Result<Vec<QuenchEstimate>> {
    let n_points = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() {
        return Err(Error::config("quench plan produced no realizations"));
    }
    if rows.iter().any(|r| r.len() != n_points) {
        return Err(Error::validation("ragged realization rows"));
    }
    (0..n_points)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(rows.len()),
            |buf, k| {
                buf.clear();
                buf.extend(rows.iter().map(|r| r[k]));
                reduce_point(buf, plan, k)
            },
        )
        .collect()
}
