//! The Poisson-wave kernel e^{−(s±iπ)√P}(y₁, y₂) = Σ_k φ_k(y₁)φ̄_k(y₂) e^{−(s±iπ)ν_k}.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cross_section::spectrum::projectors;
use crate::cross_section::{ConeModel, YPoint};
use crate::error::{ConeError, Result};
use crate::quadrature::pairwise_sum;
use crate::spectral_calculus::{with_growing_table, KernelValue, ModeTable, MAX_NU_BUDGET};

/// Smallest s accepted.
pub const POISSON_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoissonSign {
    Plus,
    Minus,
}

impl PoissonSign {
    fn value(self) -> f64 {
        match self {
            PoissonSign::Plus => 1.0,
            PoissonSign::Minus => -1.0,
        }
    }
}

/// The kernel on a fixed table with an absolute tail bound `tol`.
pub fn poisson_wave_value(table: &ModeTable, s: f64, sign: PoissonSign, y1: &YPoint, y2: &YPoint, tol: f64) -> Result<KernelValue> {
    if !(s >= POISSON_DELTA && s.is_finite()) {
        return Err(ConeError::Domain(format!("Poisson-wave kernel needs s >= {POISSON_DELTA}, got {s}")));
    }
    let g = |nu: f64| (-s * nu).exp();
    let Some((keep, bound)) = table.cutoff_with(tol, g, g) else {
        return Err(ConeError::BudgetExceeded {
            message: format!("mode budget nu <= {} cannot resolve e^(-s nu) at s = {s}", table.nu_budget),
            partial: Complex64::new(f64::NAN, f64::NAN),
            bound: f64::INFINITY,
        });
    };
    let modes = &table.modes[..keep];
    let terms: Vec<Complex64> = projectors(modes, y1, y2)
        .iter()
        .zip(modes)
        .map(|(p, m)| p * Complex64::from_polar((-s * m.nu).exp(), -sign.value() * PI * m.nu))
        .collect();
    Ok(KernelValue { value: pairwise_sum(&terms), tail_bound: bound, modes_used: keep })
}

/// e^{−(s±iπ)√P}(y₁, y₂) with absolute error ≤ tol.
pub fn poisson_wave_kernel(model: &ConeModel, s: f64, sign: PoissonSign, y1: &YPoint, y2: &YPoint, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(ConeError::Domain(format!("tol must be positive, got {tol}")));
    }
    let start = model.nu0 + (1.0 / tol).ln() / s.max(POISSON_DELTA) + 10.0;
    with_growing_table(model, start, MAX_NU_BUDGET, |t| poisson_wave_value(t, s, sign, y1, y2, tol).map(|v| v.value))
}

/// s^{1−n/2} on [δ, 2π], continued by (2π)^{1−n/2}(s/2π)^{1−n} beyond.
pub fn poisson_bound(n: usize, s: f64) -> f64 {
    let n = n as f64;
    let two_pi = 2.0 * PI;
    if s <= two_pi {
        s.powf(1.0 - 0.5 * n)
    } else {
        two_pi.powf(1.0 - 0.5 * n) * (s / two_pi).powf(1.0 - n)
    }
}
