//! Rates and limits of measurement sequences indexed by the tensor power `p`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("value at p = {p} is not positive: {value}")]
    NonPositive { p: u32, value: f64 },
    #[error("value at p = {p} is not finite")]
    NonFinite { p: u32 },
    #[error("p = {0} appears twice")]
    DuplicateP(u32),
    #[error("p-grid is not doubling: {0} is followed by {1}")]
    NotDoubling(u32, u32),
    #[error("p must be at least 1")]
    InvalidP,
}

/// One measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub p: u32,
    pub value: f64,
}

impl ExperimentRecord {
    pub fn new(experiment: impl Into<String>, p: u32, value: f64) -> Self {
        Self { experiment: experiment.into(), params: BTreeMap::new(), p, value }
    }
}

/// `value ≈ amplitude · p^{−rate}` from least squares in `(log p, log value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Largest absolute deviation of a used point from the fitted line in log space.
    pub residual: f64,
    pub p_min: u32,
    pub p_max: u32,
    pub points: usize,
    /// Set when the smallest `p` was dropped by the preasymptotic guard.
    pub dropped_smallest: bool,
}

const MIN_POINTS: usize = 4;
const GUARD_FACTOR: f64 = 3.0;
/// Deviations below this are rounding noise, never preasymptotic.
const GUARD_FLOOR: f64 = 1e-9;

fn sorted_points(records: &[ExperimentRecord]) -> Result<Vec<(u32, f64)>, AsymptoticsError> {
    let mut pts: Vec<(u32, f64)> = records.iter().map(|r| (r.p, r.value)).collect();
    pts.sort_by_key(|x| x.0);
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(AsymptoticsError::DuplicateP(w[0].0));
        }
    }
    for &(p, v) in &pts {
        if p == 0 {
            return Err(AsymptoticsError::InvalidP);
        }
        if !v.is_finite() {
            return Err(AsymptoticsError::NonFinite { p });
        }
    }
    Ok(pts)
}

/// Returns `(intercept, slope, per-point residuals)` in log space.
fn log_fit(pts: &[(u32, f64)]) -> (f64, f64, Vec<f64>) {
    let xs: Vec<f64> = pts.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    (intercept, slope, res)
}

fn fit_from(pts: &[(u32, f64)], dropped: bool) -> RateFit {
    let (intercept, slope, res) = log_fit(pts);
    RateFit {
        amplitude: intercept.exp(),
        rate: -slope,
        residual: res.iter().map(|r| r.abs()).fold(0.0, f64::max),
        p_min: pts[0].0,
        p_max: pts[pts.len() - 1].0,
        points: pts.len(),
        dropped_smallest: dropped,
    }
}

/// Power-law fit with a preasymptotic guard: the smallest `p` is excluded
/// when its log-deviation from the line through the other points exceeds
/// three times their own largest residual (and at least four points remain).
/// Measuring the deviation against the line fitted without the point keeps
/// its leverage from hiding it.
pub fn fit_power_law(records: &[ExperimentRecord]) -> Result<RateFit, AsymptoticsError> {
    if records.len() < MIN_POINTS {
        return Err(AsymptoticsError::TooFewPoints { needed: MIN_POINTS, found: records.len() });
    }
    let pts = sorted_points(records)?;
    if let Some(&(p, value)) = pts.iter().find(|x| x.1 <= 0.0) {
        return Err(AsymptoticsError::NonPositive { p, value });
    }
    if pts.len() > MIN_POINTS {
        let (intercept, slope, res) = log_fit(&pts[1..]);
        let (p0, v0) = pts[0];
        let deviation = (v0.ln() - (intercept + slope * (p0 as f64).ln())).abs();
        let rest = res.iter().map(|r| r.abs()).fold(0.0, f64::max);
        if deviation > GUARD_FACTOR * rest && deviation > GUARD_FLOOR {
            return Ok(fit_from(&pts[1..], true));
        }
    }
    Ok(fit_from(&pts, false))
}

/// Romberg extrapolation on a doubling grid. The first sweep eliminates
/// `p^{−order}`, each further sweep the next power, using every point.
pub fn richardson_extrapolate(records: &[ExperimentRecord], order: u32) -> Result<f64, AsymptoticsError> {
    let needed = order as usize + 2;
    if records.len() < needed {
        return Err(AsymptoticsError::TooFewPoints { needed, found: records.len() });
    }
    let pts = sorted_points(records)?;
    for w in pts.windows(2) {
        if w[1].0 != 2 * w[0].0 {
            return Err(AsymptoticsError::NotDoubling(w[0].0, w[1].0));
        }
    }
    let mut column: Vec<f64> = pts.iter().map(|x| x.1).collect();
    let mut exponent = order as i32;
    while column.len() > 1 {
        let factor = 2f64.powi(exponent);
        column = column.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        exponent += 1;
    }
    Ok(column[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ps: &[u32], f: impl Fn(f64) -> f64) -> Vec<ExperimentRecord> {
        ps.iter().map(|&p| ExperimentRecord::new("t", p, f(p as f64))).collect()
    }

    const GRID: [u32; 5] = [8, 16, 32, 64, 128];

    #[test]
    fn exact_power_law() {
        let fit = fit_power_law(&seq(&[8, 16, 32, 64], |p| 7.0 / (p * p))).unwrap();
        assert!((fit.amplitude - 7.0).abs() < 1e-10);
        assert!((fit.rate - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat = fit_power_law(&seq(&GRID, |_| 0.3)).unwrap();
        assert!(flat.rate.abs() < 1e-12);
    }

    #[test]
    fn shifted_law() {
        let fit = fit_power_law(&seq(&GRID, |p| 2.0 / (p + 2.0))).unwrap();
        assert!(fit.rate >= 0.9 && fit.rate <= 1.0, "{}", fit.rate);
        assert!(fit.dropped_smallest);
        let exact = fit_power_law(&seq(&GRID, |p| 3.0 / p)).unwrap();
        assert!(!exact.dropped_smallest);
    }

    #[test]
    fn guard_drops_outlier() {
        let mut recs = seq(&GRID, |p| 1.0 / (p * p));
        recs[0].value *= 10.0;
        let fit = fit_power_law(&recs).unwrap();
        assert!(fit.dropped_smallest);
        assert_eq!(fit.p_min, 16);
        assert!((fit.rate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_power_law(&seq(&[8, 16, 32], |p| p)), Err(AsymptoticsError::TooFewPoints { .. })));
        assert!(matches!(fit_power_law(&seq(&GRID, |p| p - 16.0)), Err(AsymptoticsError::NonPositive { .. })));
        assert!(matches!(fit_power_law(&seq(&[8, 8, 16, 32], |p| p)), Err(AsymptoticsError::DuplicateP(8))));
    }

    #[test]
    fn richardson() {
        let r = richardson_extrapolate(&seq(&GRID, |p| 1.0 - 2.0 / (p + 2.0)), 1).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
        assert_eq!(richardson_extrapolate(&seq(&GRID, |_| 0.25), 1).unwrap(), 0.25);
        let r = richardson_extrapolate(&seq(&[8, 16, 32], |p| 3.0 + 5.0 / p), 1).unwrap();
        assert!((r - 3.0).abs() < 1e-10);
        assert!(matches!(richardson_extrapolate(&seq(&[8, 16, 24, 48], |p| p), 1), Err(AsymptoticsError::NotDoubling(16, 24))));
        assert!(richardson_extrapolate(&seq(&[8, 16], |p| p), 1).is_err());
    }
}
