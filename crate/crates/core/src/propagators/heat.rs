//! The heat kernel e^{−σH}(z₁, z₂) and its Gaussian upper bound
//! C[min(1, r₁r₂/2σ)]^α σ^{−n/2} e^{−d²/cσ}.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::BoundReport;
use crate::cross_section::spectrum::projectors;
use crate::cross_section::{geodesic_distance, ConeModel, CrossSectionSpec, YPoint};
use crate::error::{ConeError, Result};
use crate::quadrature::pairwise_sum;
use crate::specfun::{bessel_i_scaled_real, ln_gamma};
use crate::spectral_calculus::{default_budget, with_growing_table, KernelQuery, KernelValue, ModeTable, MAX_NU_BUDGET};

/// Constants of the Gaussian upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatConstants {
    /// Prefactor C.
    pub scale: f64,
    /// Gaussian width c.
    pub width: f64,
}

/// Distance on the cone: r₁² + r₂² − 2r₁r₂cos(min(d_h(y₁, y₂), π)).
pub fn cone_distance(spec: &CrossSectionSpec, r1: f64, y1: &YPoint, r2: f64, y2: &YPoint) -> Result<f64> {
    let angle = geodesic_distance(spec, y1, y2)?.min(std::f64::consts::PI);
    Ok((r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * angle.cos()).max(0.0).sqrt())
}

/// Heat kernel on a fixed table. `q.t` is ignored; the tail is at most
/// tol·σ^{−n/2}. The value is complex only for eigenbases that are not
/// closed under conjugation.
pub fn heat_kernel_value(table: &ModeTable, sigma: f64, q: &KernelQuery, tol: f64) -> Result<KernelValue> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ConeError::Domain(format!("heat kernel needs sigma > 0, got {sigma}")));
    }
    let n = table.model.n as f64;
    let w = q.r1 * q.r2 / (2.0 * sigma);
    let log_pref = -0.5 * (n - 2.0) * (q.r1 * q.r2).ln() - (2.0 * sigma).ln();
    let log_outer = log_pref - (q.r1 * q.r1 + q.r2 * q.r2) / (4.0 * sigma);
    // |I_ν(w)| ≤ (w/2)^ν/Γ(ν+1)·e^{w²/4(ν+1)}
    let g = |nu: f64| (log_outer + nu * (0.5 * w).ln() - ln_gamma(nu + 1.0) + w * w / (4.0 * (nu + 1.0))).exp();
    let abs_tol = tol * sigma.powf(-0.5 * n);
    let Some((keep, bound)) = table.cutoff_with(abs_tol, g, g) else {
        return Err(ConeError::BudgetExceeded {
            message: format!("mode budget nu <= {} cannot resolve the heat kernel at w = {w}", table.nu_budget),
            partial: Complex64::new(f64::NAN, f64::NAN),
            bound: f64::INFINITY,
        });
    };
    let modes = &table.modes[..keep];
    let radial = (log_pref - (q.r1 - q.r2).powi(2) / (4.0 * sigma)).exp();
    let vals: Vec<f64> = modes.par_iter().map(|m| bessel_i_scaled_real(m.nu, w)).collect();
    let terms: Vec<Complex64> = projectors(modes, &q.y1, &q.y2).iter().zip(&vals).map(|(p, v)| p * v).collect();
    Ok(KernelValue { value: radial * pairwise_sum(&terms), tail_bound: bound, modes_used: keep })
}

/// e^{−σH}(z₁, z₂) with |error| ≤ tol·σ^{−n/2}, for conjugation-closed
/// eigenbases (every built-in cross-section).
pub fn heat_kernel(model: &ConeModel, sigma: f64, q: &KernelQuery, tol: f64) -> Result<f64> {
    let w = q.r1 * q.r2 / (2.0 * sigma);
    with_growing_table(model, default_budget(model, w), MAX_NU_BUDGET, |t| heat_kernel_value(t, sigma, q, tol).map(|v| v.value.re))
}

/// C[min(1, r₁r₂/2σ)]^α σ^{−n/2} e^{−d²/cσ}.
pub fn heat_bound(model: &ConeModel, sigma: f64, q: &KernelQuery, constants: &HeatConstants) -> Result<f64> {
    let d = cone_distance(&model.spec, q.r1, &q.y1, q.r2, &q.y2)?;
    let w = q.r1 * q.r2 / (2.0 * sigma);
    Ok(constants.scale * w.min(1.0).powf(model.alpha) * sigma.powf(-0.5 * model.n as f64) * (-d * d / (constants.width * sigma)).exp())
}

/// Kernel value with its report against the bound.
pub fn heat_report(model: &ConeModel, sigma: f64, q: &KernelQuery, constants: &HeatConstants, tol: f64) -> Result<(f64, BoundReport)> {
    let k = heat_kernel(model, sigma, q, tol)?;
    let b = heat_bound(model, sigma, q, constants)?;
    Ok((k, BoundReport::new(k.abs(), b)?))
}

/// Accuracy of a heat kernel value computed at tolerance `tol`.
pub fn heat_floor(model: &ConeModel, sigma: f64, tol: f64) -> f64 {
    tol * sigma.powf(-0.5 * model.n as f64)
}

/// Samples at most this many floors in size carry no information about C.
pub const HEAT_RESOLVED_FLOORS: f64 = 10.0;

/// C = 1.05·max |K|/bound over the resolved samples at unit scale and the
/// given width.
pub fn calibrate_heat(model: &ConeModel, samples: &[(f64, KernelQuery)], width: f64, tol: f64) -> Result<HeatConstants> {
    let unit = HeatConstants { scale: 1.0, width };
    let ratios: Result<Vec<Option<f64>>> = samples
        .par_iter()
        .map(|(sigma, q)| {
            let k = heat_kernel(model, *sigma, q, tol)?.abs();
            if k <= HEAT_RESOLVED_FLOORS * heat_floor(model, *sigma, tol) {
                return Ok(None);
            }
            Ok(Some(k / heat_bound(model, *sigma, q, &unit)?))
        })
        .collect();
    let max = ratios?.into_iter().flatten().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(ConeError::InsufficientData("no heat sample rises above the truncation floor".into()));
    }
    Ok(HeatConstants { scale: 1.05 * max, width })
}
