//! Sampled time series with per-point spreads.

use serde::{Deserialize, Serialize};

use crate::disorder::{CompensatedSum, QuenchEstimate};
use crate::{Error, Result};

/// Relative tolerance when deciding whether a grid is uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// `t` strictly increasing; `value` and `spread` aligned with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    value: Vec<f64>,
    spread: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, value: Vec<f64>, spread: Vec<f64>) -> Result<Self> {
        if t.len() != value.len() || t.len() != spread.len() {
            return Err(Error::validation(format!(
                "series lengths differ: t {}, value {}, spread {}",
                t.len(),
                value.len(),
                spread.len()
            )));
        }
        if let Some(w) = t.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::validation(format!(
                "time grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { t, value, spread })
    }

    /// Closed-form values: zero spread.
    pub fn exact(t: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        let spread = vec![0.0; value.len()];
        Self::new(t, value, spread)
    }

    pub fn from_estimates(t: Vec<f64>, estimates: &[QuenchEstimate]) -> Result<Self> {
        let value = estimates.iter().map(|e| e.estimate).collect();
        let spread = estimates.iter().map(|e| e.spread).collect();
        Self::new(t, value, spread)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn value(&self) -> &[f64] {
        &self.value
    }

    pub fn spread(&self) -> &[f64] {
        &self.spread
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.t
            .iter()
            .zip(&self.value)
            .zip(&self.spread)
            .map(|((&t, &v), &s)| (t, v, s))
    }

    /// The common step if the grid is uniform.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.t.len() < 2 {
            return None;
        }
        let dt = (self.t[self.t.len() - 1] - self.t[0]) / (self.t.len() - 1) as f64;
        let uniform = self
            .t
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= UNIFORM_TOL * dt.max(1.0));
        uniform.then_some(dt)
    }

    /// Mean over the trailing `fraction` of the series; spread is the
    /// standard deviation of the values in that window.
    pub fn saturation(&self, fraction: f64) -> Result<QuenchEstimate> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::validation(format!(
                "saturation fraction must be in (0, 1], got {fraction}"
            )));
        }
        let Some(&t_end) = self.t.last() else {
            return Err(Error::validation("saturation of an empty series"));
        };
        let t_from = t_end - fraction * (t_end - self.t[0]);
        let tail: Vec<f64> = self
            .iter()
            .filter(|&(t, _, _)| t >= t_from)
            .map(|(_, v, _)| v)
            .collect();
        let n = tail.len() as f64;
        let mean = tail.iter().copied().collect::<CompensatedSum>().value() / n;
        let var = if tail.len() > 1 {
            tail.iter()
                .map(|v| (v - mean) * (v - mean))
                .collect::<CompensatedSum>()
                .value()
                / (n - 1.0)
        } else {
            0.0
        };
        Ok(QuenchEstimate {
            estimate: mean,
            spread: var.sqrt(),
        })
    }

    /// Points with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.iter().filter(move |&(t, _, _)| t >= lo && t <= hi)
    }
}

/// Uniform grid `t_k = k * dt` for `k = 0..=K`, `K = floor(tmax / dt)`
/// (a final point within rounding of `tmax` is kept).
pub fn time_grid(tmax: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::validation(format!("time step must be positive, got {dt}")));
    }
    if !(tmax >= 0.0 && tmax.is_finite()) {
        return Err(Error::validation(format!(
            "time horizon must be non-negative, got {tmax}"
        )));
    }
    let k_max = (tmax / dt + 1e-9).floor() as usize;
    Ok((0..=k_max).map(|k| k as f64 * dt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        let g = time_grid(1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert!((g[10] - 1.0).abs() < 1e-15);
        assert!(time_grid(1.0, 0.0).is_err());
        assert_eq!(time_grid(0.0, 0.5).unwrap(), vec![0.0]);
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(TimeSeries::exact(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TimeSeries::exact(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn uniform_step_detection() {
        let s = TimeSeries::exact(time_grid(5.0, 0.01).unwrap(), vec![0.0; 501]).unwrap();
        assert!((s.uniform_step().unwrap() - 0.01).abs() < 1e-12);
        let s = TimeSeries::exact(vec![0.0, 1.0, 3.0], vec![0.0; 3]).unwrap();
        assert!(s.uniform_step().is_none());
    }

    #[test]
    fn saturation_uses_tail() {
        let t = time_grid(10.0, 1.0).unwrap();
        let v: Vec<f64> = t.iter().map(|&t| if t >= 8.0 { 2.0 } else { 0.0 }).collect();
        let s = TimeSeries::exact(t, v).unwrap().saturation(0.2).unwrap();
        assert_eq!(s.estimate, 2.0);
        assert_eq!(s.spread, 0.0);
    }
}
