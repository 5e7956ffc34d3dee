//! Straight-line fits in log–log coordinates.

use serde::Serialize;

use crate::error::{ConeError, Result};
use crate::stats::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Largest |residual| in log space.
    pub max_residual: f64,
}

/// Least squares of log y on log x. Needs at least five samples with x
/// strictly increasing and x, y > 0.
pub fn fit_loglog(samples: &[(f64, f64)]) -> Result<LogLogFit> {
    if samples.len() < 5 {
        return Err(ConeError::Domain(format!("log-log fit needs at least 5 samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(ConeError::Domain("log-log fit needs strictly increasing x".into()));
    }
    if samples.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(ConeError::Domain("log-log fit needs finite positive samples".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (slope, intercept, stderr, max_residual) = linear_fit(&xs, &ys).ok_or_else(|| ConeError::Domain("degenerate x range".into()))?;
    Ok(LogLogFit { slope, intercept, stderr, max_residual })
}

/// n points from lo to hi, equally spaced in log.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}
