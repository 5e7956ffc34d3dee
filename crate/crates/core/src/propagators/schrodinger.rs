//! The Schrödinger kernel
//!
//! K(t, z₁, z₂) = (r₁r₂)^{−(n−2)/2} e^{−(r₁²+r₂²)/4it}/(2it) Σ_k φ_k(y₁)φ̄_k(y₂) (−i)^{ν_k} J_{ν_k}(r₁r₂/2t)
//!
//! as a Bessel series, by the integral representation of I_ν(r₁r₂/2it), and
//! as the ε → 0⁺ limit of Weber's second exponential integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cross_section::spectrum::projectors;
use crate::cross_section::ConeModel;
use crate::error::{ConeError, Result};
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::specfun::{i_integral_representation, j_value, I_MAX_MODULUS};
use crate::spectral_calculus::{
    default_budget, weber_closed_form, with_growing_table, KernelQuery, KernelValue, ModeTable, Multiplier, MAX_NU_BUDGET,
};

fn check_t(q: &KernelQuery) -> Result<()> {
    if q.t == 0.0 {
        return Err(ConeError::Domain("the Schrödinger kernel needs t != 0".into()));
    }
    Ok(())
}

/// (r₁r₂)^{−(n−2)/2} e^{−(r₁²+r₂²)/4it}/(2it).
pub fn schrodinger_prefactor(n: usize, q: &KernelQuery) -> Complex64 {
    let it = Complex64::new(0.0, q.t);
    (q.r1 * q.r2).powf(-0.5 * (n as f64 - 2.0)) * (-(q.r1 * q.r1 + q.r2 * q.r2) / (4.0 * it)).exp() / (2.0 * it)
}

/// Budget for the absolute tail of the mode sum so that the kernel error is
/// at most tol·|t|^{−n/2}.
fn sum_tolerance(n: usize, q: &KernelQuery, tol: f64) -> f64 {
    tol * q.t.abs().powf(-0.5 * n as f64) / schrodinger_prefactor(n, q).norm()
}

/// Σ_k φ_k(y₁)φ̄_k(y₂) (−i·sgn t)^{ν_k} J_{ν_k}(z) with z = r₁r₂/2|t|, truncated
/// so that the dropped modes contribute at most `sum_tol`.
pub fn schrodinger_mode_sum(table: &ModeTable, q: &KernelQuery, sum_tol: f64) -> Result<KernelValue> {
    check_t(q)?;
    let z = q.z();
    let (keep, bound) = table.cutoff_for(z, sum_tol).ok_or_else(|| budget_error(table, q))?;
    let modes = &table.modes[..keep];
    let sign = q.t.signum();
    let vals: Vec<Complex64> = modes.par_iter().map(|m| Complex64::from_polar(j_value(m.nu, z), -sign * 0.5 * PI * m.nu)).collect();
    let proj = projectors(modes, &q.y1, &q.y2);
    let terms: Vec<Complex64> = proj.iter().zip(&vals).map(|(p, v)| p * v).collect();
    Ok(KernelValue { value: pairwise_sum(&terms), tail_bound: bound, modes_used: keep })
}

fn budget_error(table: &ModeTable, q: &KernelQuery) -> ConeError {
    ConeError::BudgetExceeded {
        message: format!("mode budget nu <= {} does not reach z = {}", table.nu_budget, q.z()),
        partial: Complex64::new(f64::NAN, f64::NAN),
        bound: f64::INFINITY,
    }
}

/// Series form on a given table; the tail bound is in kernel units.
pub fn schrodinger_kernel_with(table: &ModeTable, q: &KernelQuery, tol: f64) -> Result<KernelValue> {
    let n = table.model.n;
    let pref = schrodinger_prefactor(n, q);
    let s = schrodinger_mode_sum(table, q, sum_tolerance(n, q, tol))?;
    Ok(KernelValue { value: pref * s.value, tail_bound: pref.norm() * s.tail_bound, modes_used: s.modes_used })
}

/// K(t, z₁, z₂) by the Bessel series, with |error| ≤ tol·|t|^{−n/2}.
pub fn schrodinger_kernel(model: &ConeModel, q: &KernelQuery, tol: f64) -> Result<Complex64> {
    check_t(q)?;
    with_growing_table(model, default_budget(model, q.z()), MAX_NU_BUDGET, |t| schrodinger_kernel_with(t, q, tol).map(|v| v.value))
}

/// K(t, z₁, z₂) with every mode evaluated as I_ν(r₁r₂/2it) from its integral
/// representation instead of the Bessel series.
pub fn schrodinger_kernel_integral_form(model: &ConeModel, q: &KernelQuery, tol: f64) -> Result<Complex64> {
    check_t(q)?;
    let n = model.n;
    let sum_tol = sum_tolerance(n, q, tol);
    with_growing_table(model, default_budget(model, q.z()), MAX_NU_BUDGET, |table| {
        // |I_ν(−iz)| = |J_ν(z)|, so the same envelope cut applies
        let (keep, _) = table.cutoff_for(q.z(), 0.5 * sum_tol).ok_or_else(|| budget_error(table, q))?;
        let modes = &table.modes[..keep];
        let w = Complex64::new(0.0, -q.r1 * q.r2 / (2.0 * q.t));
        let per_mode = 0.5 * sum_tol / (keep.max(1) as f64 * modes.iter().map(|m| m.sup_sum()).fold(1.0, f64::max));
        let vals: Result<Vec<Complex64>> = modes.par_iter().map(|m| Ok(i_integral_representation(m.nu, w, per_mode)?.value)).collect();
        let vals = vals?;
        let proj = projectors(modes, &q.y1, &q.y2);
        let terms: Vec<Complex64> = proj.iter().zip(&vals).map(|(p, v)| p * v).collect();
        Ok(schrodinger_prefactor(n, q) * pairwise_sum(&terms))
    })
}

/// ∫₀^∞ e^{−(ε+it)ρ²} J_ν(r₁ρ) J_ν(r₂ρ) ρ dρ by panel Gauss–Legendre up to
/// ρ_max = √(ln(1/tol)/ε) + 2, with ten nodes per local wavelength.
pub fn weber_lhs(nu: f64, epsilon: f64, t: f64, r1: f64, r2: f64, tol: f64) -> Result<Complex64> {
    let rho_max = ((1.0 / tol).ln() / epsilon).sqrt() + 2.0;
    let omega = 2.0 * t.abs() * rho_max + r1 + r2 + 1.0;
    let panel = (1.6 * PI / omega).min(0.5);
    let panels = (rho_max / panel).ceil() as usize;
    let rule = GaussLegendre::cached(16);
    let p = Complex64::new(epsilon, t);
    let sums: Vec<Complex64> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let a = rho_max * k as f64 / panels as f64;
            let b = rho_max * (k + 1) as f64 / panels as f64;
            let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
            let terms: Vec<Complex64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| {
                    let rho = mid + half * x;
                    let j1 = j_value(nu, r1 * rho);
                    let j2 = if r1 == r2 { j1 } else { j_value(nu, r2 * rho) };
                    (-p * rho * rho).exp() * (half * w * j1 * j2 * rho)
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&sums))
}

/// |quadrature − closed form| for Weber's second exponential integral.
pub fn weber_identity_residual(nu: f64, epsilon: f64, t: f64, r1: f64, r2: f64, tol: f64) -> Result<f64> {
    if !(epsilon >= 0.02) {
        return Err(ConeError::Domain(format!("epsilon = {epsilon} is below the validated floor 0.02")));
    }
    if !(nu >= 0.0 && r1 >= 0.0 && r2 >= 0.0 && t.is_finite() && tol > 0.0 && tol <= 1e-4) {
        return Err(ConeError::Domain("need nu >= 0, r1, r2 >= 0, finite t and tol in (0, 1e-4]".into()));
    }
    let w = r1 * r2 / (2.0 * Complex64::new(epsilon, t).norm());
    if w > I_MAX_MODULUS {
        return Err(ConeError::Domain(format!("|r1 r2 / 2(eps + it)| = {w} exceeds {I_MAX_MODULUS}")));
    }
    let lhs = weber_lhs(nu, epsilon, t, r1, r2, tol)?;
    let rhs = weber_closed_form(nu, Complex64::new(epsilon, t), r1, r2, 1e-13)?;
    Ok((lhs - rhs).norm())
}

/// The kernel of e^{−(ε+it)H} at the query, Weber form per mode.
pub fn damped_schrodinger_kernel(model: &ConeModel, epsilon: f64, q: &KernelQuery, tol: f64) -> Result<Complex64> {
    let f = Multiplier::Gaussian { p: Complex64::new(epsilon, q.t) };
    let w = q.r1 * q.r2 / (2.0 * Complex64::new(epsilon, q.t).norm());
    with_growing_table(model, default_budget(model, w), MAX_NU_BUDGET, |table| table.kernel(&f, q, tol).map(|v| v.value))
}

/// Polynomial extrapolation to ε = 0 of the damped kernels at the given ε
/// (two or more distinct positive values).
pub fn epsilon_limit(model: &ConeModel, q: &KernelQuery, epsilons: &[f64], tol: f64) -> Result<Complex64> {
    check_t(q)?;
    if epsilons.len() < 2 || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(ConeError::Domain("need at least two positive epsilons".into()));
    }
    let vals: Result<Vec<Complex64>> = epsilons.iter().map(|e| damped_schrodinger_kernel(model, *e, q, tol)).collect();
    Ok(extrapolate_to_zero(epsilons, &vals?))
}

/// Lagrange interpolant through (x_i, v_i) evaluated at 0.
pub fn extrapolate_to_zero(xs: &[f64], vs: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (xi, vi)) in xs.iter().zip(vs).enumerate() {
        let mut l = 1.0;
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                l *= xj / (xj - xi);
            }
        }
        acc += vi * l;
    }
    acc
}

/// The 20 default (t, r₁, r₂) samples used to compare representations.
pub fn default_comparison_samples() -> Vec<(f64, f64, f64)> {
    let ts = [0.5, 1.0, 2.0, -1.0, 4.0];
    let rs = [(0.5, 0.5), (1.0, 1.0), (0.7, 1.6), (2.0, 1.2)];
    ts.iter().flat_map(|&t| rs.iter().map(move |&(a, b)| (t, a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{CrossSectionSpec, CustomSpectrum, YPoint};

    fn torus11() -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap()
    }

    fn query(t: f64, r1: f64, r2: f64) -> KernelQuery {
        KernelQuery::new(t, r1, YPoint::angles(&[0.3, 1.1]), r2, YPoint::angles(&[1.0, -0.4])).unwrap()
    }

    #[test]
    fn symmetry_and_time_reversal() {
        let m = torus11();
        let q = query(0.8, 0.9, 1.7);
        let k = schrodinger_kernel(&m, &q, 1e-10).unwrap();
        let ks = schrodinger_kernel(&m, &q.swapped(), 1e-10).unwrap();
        assert!((k - ks).norm() < 1e-12);
        let mut back = q.clone();
        back.t = -0.8;
        let kb = schrodinger_kernel(&m, &back, 1e-10).unwrap();
        assert!((kb - k.conj()).norm() < 1e-12);
        assert!(schrodinger_kernel(&m, &query(0.0, 1.0, 1.0), 1e-8).is_err());
    }

    #[test]
    fn series_matches_epsilon_limit() {
        let m = torus11();
        let y = YPoint::angles(&[0.0, 0.0]);
        let q = KernelQuery::new(1.0, 1.0, y.clone(), 1.0, y).unwrap();
        let series = schrodinger_kernel(&m, &q, 1e-10).unwrap();
        let oracle = epsilon_limit(&m, &q, &[0.1, 0.05, 0.025], 1e-12).unwrap();
        assert!((series - oracle).norm() < 1e-4, "{series} vs {oracle}");
    }

    #[test]
    fn integral_form_agrees_on_a_few_samples() {
        let m = torus11();
        for &(t, r1, r2) in default_comparison_samples().iter().step_by(4) {
            let q = query(t, r1, r2);
            let a = schrodinger_kernel(&m, &q, 1e-9).unwrap();
            let b = schrodinger_kernel_integral_form(&m, &q, 1e-9).unwrap();
            assert!((a - b).norm() <= 1e-6 * t.abs().powf(-1.5), "t {t}: {a} vs {b}");
        }
    }

    #[test]
    fn single_mode_integral_is_the_bessel_term() {
        let spec = CrossSectionSpec::custom(CustomSpectrum::constant_only(2, 1.0));
        let m = ConeModel::new(3, spec, 1.44 - 0.25).unwrap();
        let y = YPoint::angles(&[0.0, 0.0]);
        let q = KernelQuery::new(0.6, 1.1, y.clone(), 1.4, y).unwrap();
        let z = q.z();
        let want = schrodinger_prefactor(3, &q) * Complex64::from_polar(j_value(1.2, z), -0.6 * PI);
        let got = schrodinger_kernel_integral_form(&m, &q, 1e-12).unwrap();
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn weber_examples() {
        let r = weber_identity_residual(0.0, 1.0, 0.0, 0.0, 0.0, 1e-12).unwrap();
        assert!(r < 1e-13);
        assert!((weber_lhs(0.0, 1.0, 0.0, 0.0, 0.0, 1e-14).unwrap() - 0.5).norm() < 1e-13);
        assert!(weber_identity_residual(0.5, 0.5, 0.7, 1.0, 2.0, 1e-12).unwrap() <= 1e-8);
        assert!(weber_identity_residual(1.3, 0.1, 2.0, 1.5, 1.5, 1e-12).unwrap() <= 1e-7);
        assert!(weber_identity_residual(1.0, 0.01, 0.0, 1.0, 1.0, 1e-12).is_err());
        assert!(weber_identity_residual(1.0, 0.05, 0.0, 3.0, 3.0, 1e-12).is_err());
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let xs = [0.1, 0.05, 0.025];
        let vs: Vec<Complex64> = xs.iter().map(|x| Complex64::new(2.0 - 3.0 * x + 5.0 * x * x, x * x)).collect();
        assert!((extrapolate_to_zero(&xs, &vs) - Complex64::new(2.0, 0.0)).norm() < 1e-13);
    }
}
