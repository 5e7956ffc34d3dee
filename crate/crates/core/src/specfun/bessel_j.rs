//! Bessel functions of the first kind J_ν(x) for real order ν > −1 and x ≥ 0.
//!
//! Three evaluation routes are used: the power series when it has no
//! damaging cancellation, the Hankel large-argument expansion when its first
//! omitted term is below tolerance, and otherwise backward (Miller)
//! recurrence in the order, normalised by the Neumann sum
//! `(x/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x)`.

use num_complex::Complex64;

use super::gamma::{gamma_unchecked, ln_gamma};
use super::{EvalResult, Regime, SpecFunError};

const EPS: f64 = f64::EPSILON;
const SERIES_MAX_TERMS: usize = 600;
const ASYMPTOTIC_MAX_TERMS: usize = 60;
const RESCALE_AT: f64 = 1e250;

/// J_ν(x) with the requested tolerance.
///
/// The error target is `tol * max(1, |J_ν(x)|)`; when no route reaches it the
/// best value is returned inside [`SpecFunError::PrecisionLoss`].
pub fn bessel_j(nu: f64, x: f64, tol: f64) -> Result<EvalResult, SpecFunError> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(SpecFunError::Domain(format!("tolerance must lie in (0, 1e-4], got {tol}")));
    }
    if nu.is_nan() || nu < 0.0 || x.is_nan() || x < 0.0 || !x.is_finite() {
        return Err(SpecFunError::Domain(format!("bessel_j requires nu >= 0 and finite x >= 0, got nu = {nu}, x = {x}")));
    }
    let (value, err, regime) = j_eval(nu, x, tol);
    let res = EvalResult { value: Complex64::new(value, 0.0), abs_error_estimate: err, regime };
    if err <= tol * value.abs().max(1.0) {
        Ok(res)
    } else {
        Err(SpecFunError::PrecisionLoss(res))
    }
}

/// J′_ν(x) = J_{ν−1}(x) − ν J_ν(x)/x.
pub fn bessel_j_derivative(nu: f64, x: f64, tol: f64) -> Result<EvalResult, SpecFunError> {
    if !(nu > 0.0) || !(x > 0.0) {
        return Err(SpecFunError::Domain(format!("bessel_j_derivative requires nu > 0 and x > 0, got nu = {nu}, x = {x}")));
    }
    let j = bessel_j(nu, x, tol)?;
    let jm1 = if nu >= 1.0 {
        bessel_j(nu - 1.0, x, tol)?
    } else {
        // order in (-1, 0): step down once with the three-term recurrence
        let jp1 = bessel_j(nu + 1.0, x, tol)?;
        let v = 2.0 * nu / x * j.value.re - jp1.value.re;
        EvalResult {
            value: Complex64::new(v, 0.0),
            abs_error_estimate: 2.0 * nu / x * j.abs_error_estimate + jp1.abs_error_estimate,
            regime: j.regime,
        }
    };
    let value = jm1.value.re - nu * j.value.re / x;
    Ok(EvalResult {
        value: Complex64::new(value, 0.0),
        abs_error_estimate: jm1.abs_error_estimate + nu / x * j.abs_error_estimate,
        regime: j.regime,
    })
}

/// Plain value of J_ν(x) at a working tolerance of 1e-13, for hot loops.
///
/// Never fails; when no route certifies the tolerance the best estimate is
/// returned.
#[inline]
pub fn j_value(nu: f64, x: f64) -> f64 {
    j_eval(nu, x, 1e-13).0
}

/// Route selection shared by the public entry points.
///
/// The first route that certifies the tolerance wins, tried in the order
/// series, asymptotic, recurrence; otherwise the smallest error estimate.
pub(crate) fn j_eval(nu: f64, x: f64, tol: f64) -> (f64, f64, Regime) {
    if x == 0.0 {
        return (if nu == 0.0 { 1.0 } else { 0.0 }, 0.0, Regime::Series);
    }
    let ok = |v: f64, e: f64| e <= tol * v.abs().max(1.0);
    let mut best = (0.0, f64::INFINITY, Regime::Series);
    if x <= 12.0 || x * x <= 4.0 * (nu + 1.0) {
        let (v, e) = j_series(nu, x);
        if ok(v, e) {
            return (v, e, Regime::Series);
        }
        best = (v, e, Regime::Series);
    }
    if x >= 20.0 {
        if let Some((v, e)) = j_asymptotic(nu, x) {
            if ok(v, e) {
                return (v, e, Regime::Asymptotic);
            }
            if e < best.1 {
                best = (v, e, Regime::Asymptotic);
            }
        }
    }
    let (v, e) = j_miller(nu, x);
    if e < best.1 {
        best = (v, e, Regime::Recurrence);
    }
    best
}

/// Power series. Returns (value, error estimate).
pub(crate) fn j_series(nu: f64, x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let lead = if nu + 1.0 < 150.0 { half.powf(nu) / gamma_unchecked(nu + 1.0) } else { (nu * half.ln() - ln_gamma(nu + 1.0)).exp() };
    if lead == 0.0 {
        return (0.0, f64::MIN_POSITIVE);
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    let mut max_term = lead.abs();
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        max_term = max_term.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs() && (k as f64) > half {
            break;
        }
        if k >= SERIES_MAX_TERMS {
            return (sum, f64::INFINITY);
        }
    }
    let err = term.abs() + 4.0 * EPS * max_term * (k as f64).sqrt() + EPS * sum.abs();
    (sum, err)
}

/// Hankel expansion; `None` when the terms never become small.
pub(crate) fn j_asymptotic(nu: f64, x: f64) -> Option<(f64, f64)> {
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut b = 1.0f64;
    let mut last = 1.0f64;
    let mut converged = false;
    for k in 1..=ASYMPTOTIC_MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = b * (mu4 - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > b.abs() && k > 1 {
            // terms have begun to grow: stop before adding this one
            last = b.abs();
            break;
        }
        b = next;
        match k % 4 {
            1 => q += b,
            2 => p -= b,
            3 => q -= b,
            _ => p += b,
        }
        last = b.abs();
        if b.abs() < 1e-17 {
            converged = true;
            break;
        }
    }
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    let (s, c) = chi.sin_cos();
    let value = amp * (p * c - q * s);
    let trunc = if converged { 0.0 } else { last };
    // phase error grows with the magnitude of chi
    let err = amp * (trunc + 4.0 * EPS * (1.0 + p.abs() + q.abs()) * (1.0 + chi.abs()));
    if !err.is_finite() {
        return None;
    }
    Some((value, err))
}

/// Backward recurrence with Neumann-sum normalisation.
pub(crate) fn j_miller(nu: f64, x: f64) -> (f64, f64) {
    let order = nu.floor();
    let mu = nu - order;
    let target = order as usize;
    let span = order.max(x);
    let m_start = (span + (400.0 * span.max(1.0)).sqrt() + 20.0).ceil() as usize;
    // make the start index even so the normalisation picks up J_{mu+2i}
    let m_start = m_start + (m_start % 2);

    // c_i = (mu + 2i) Γ(mu + i) / i!, computed downwards from i = m_start / 2
    let i_top = m_start / 2;
    let mut g = if i_top >= 1 { (ln_gamma(mu + i_top as f64) - ln_gamma(i_top as f64 + 1.0)).exp() } else { 0.0 };

    let mut j_next = 0.0f64; // J_{k+1}
    let mut j_cur = 1e-30f64; // J_k, k = m_start
    let mut norm = 0.0f64;
    let mut norm_abs = 0.0f64;
    let mut stored = if target == m_start { j_cur } else { 0.0 };

    let mut k = m_start;
    if k.is_multiple_of(2) && k / 2 >= 1 {
        let c = (mu + k as f64) * g;
        norm += c * j_cur;
        norm_abs += (c * j_cur).abs();
    }
    while k > 0 {
        let j_prev = 2.0 * (mu + k as f64) / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        if k == target {
            stored = j_cur;
        }
        if k.is_multiple_of(2) {
            let i = k / 2;
            let c = if i == 0 {
                gamma_unchecked(mu + 1.0)
            } else {
                // step g from Γ(mu+i+1)/(i+1)! down to Γ(mu+i)/i!
                g *= (i as f64 + 1.0) / (mu + i as f64);
                (mu + 2.0 * i as f64) * g
            };
            norm += c * j_cur;
            norm_abs += (c * j_cur).abs();
        }
        if j_cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            norm_abs *= s;
            stored *= s;
        }
    }
    let scale = (0.5 * x).powf(mu) / norm;
    let value = stored * scale;
    let cancel = norm_abs / norm.abs();
    let err = value.abs() * EPS * (8.0 * cancel + (m_start as f64).sqrt() * 4.0) + 1e-300;
    (value, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn half_order(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }

    fn three_half_order(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos())
    }

    #[test]
    fn known_values() {
        let r = bessel_j(0.0, 0.0, 1e-10).unwrap();
        assert_eq!(r.value.re, 1.0);
        let r = bessel_j(0.5, PI / 2.0, 1e-10).unwrap();
        assert!((r.value.re - std::f64::consts::FRAC_2_PI).abs() < 1e-14);
        let r = bessel_j(1.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert_eq!(bessel_j(3.2, 0.0, 1e-8).unwrap().value.re, 0.0);
    }

    #[test]
    fn half_order_closed_forms() {
        let mut x = 1e-3;
        while x <= 50.0 {
            let a = bessel_j(0.5, x, 1e-12).unwrap().value.re;
            let b = bessel_j(1.5, x, 1e-12).unwrap().value.re;
            assert!((a - half_order(x)).abs() < 1e-10, "x = {x}");
            assert!((b - three_half_order(x)).abs() < 1e-10, "x = {x}");
            x *= 1.05;
        }
    }

    #[test]
    fn routes_agree_in_overlap() {
        for &nu in &[0.0, 0.3, 1.7, 4.2, 9.9] {
            for &x in &[20.0, 25.0, 33.3, 48.0] {
                let (m, _) = j_miller(nu, x);
                let (a, ea) = j_asymptotic(nu, x).unwrap();
                if nu < 5.0 || x > 30.0 {
                    assert!(ea < 1e-10, "nu = {nu}, x = {x}: {ea}");
                }
                assert!((m - a).abs() < 1e-12 + 2.0 * ea, "nu = {nu}, x = {x}: {m} vs {a}");
            }
        }
        for &nu in &[0.0, 0.8, 3.5, 11.0] {
            for &x in &[0.5, 3.0, 7.5, 11.5] {
                let (s, _) = j_series(nu, x);
                let (m, _) = j_miller(nu, x);
                assert!((s - m).abs() < 1e-12, "nu = {nu}, x = {x}: {s} vs {m}");
            }
        }
    }

    #[test]
    fn large_order_small_argument() {
        // J_ν(x) ~ (x/2)^ν / Γ(ν+1) when ν ≫ x²
        let nu = 200.3;
        let x = 5.0;
        let v = j_value(nu, x);
        let lead = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
        let q = 0.25 * x * x;
        let three_terms = lead * (1.0 - q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0)));
        assert!(((v - three_terms) / three_terms).abs() < 1e-5);
        // transition region, checked against recurrence identities
        for &(nu, x) in &[(150.5, 140.0), (250.25, 251.0), (60.7, 95.0)] {
            let a = j_value(nu - 1.0, x);
            let b = j_value(nu, x);
            let c = j_value(nu + 1.0, x);
            let resid = (a + c - 2.0 * nu / x * b).abs();
            assert!(resid < 1e-12, "nu = {nu}, x = {x}, resid = {resid}");
        }
    }

    #[test]
    fn derivative_examples() {
        let d = bessel_j_derivative(1.0, 1e-8, 1e-10).unwrap();
        assert!((d.value.re - 0.5).abs() < 1e-8);
        let d = bessel_j_derivative(0.5, PI / 2.0, 1e-12).unwrap();
        assert!((d.value.re + 0.202_642_367_284_675_6).abs() < 1e-12);
        // finite-difference check against the series
        let h = 1e-6;
        let fd = (j_series(2.3, 7.1 + h).0 - j_series(2.3, 7.1 - h).0) / (2.0 * h);
        let d = bessel_j_derivative(2.3, 7.1, 1e-12).unwrap();
        assert!((d.value.re - fd).abs() < 1e-6);
        // order below one goes through the upward step
        let fd = (j_series(0.4, 3.0 + h).0 - j_series(0.4, 3.0 - h).0) / (2.0 * h);
        let d = bessel_j_derivative(0.4, 3.0, 1e-12).unwrap();
        assert!((d.value.re - fd).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bessel_j(-0.5, 1.0, 1e-8), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_j(0.5, -1.0, 1e-8), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_j(0.5, 1.0, 1e-2), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_j_derivative(0.0, 1.0, 1e-8), Err(SpecFunError::Domain(_))));
    }
}
