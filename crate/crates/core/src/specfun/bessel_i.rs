//! Modified Bessel functions of the first kind I_ν(w) for real ν ≥ 0 and
//! complex w with |w| ≤ 60, plus the exponentially scaled real-argument
//! variant used by the heat kernel.

use num_complex::Complex64;

use super::gamma::{gamma_unchecked, ln_gamma};
use super::{EvalResult, Regime, SpecFunError};

const EPS: f64 = f64::EPSILON;

/// Radius of the validated disc for complex arguments.
pub const I_MAX_MODULUS: f64 = 60.0;

/// I_ν(w), principal branch of (w/2)^ν.
pub fn bessel_i(nu: f64, w: Complex64, tol: f64) -> Result<EvalResult, SpecFunError> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(SpecFunError::Domain(format!("tolerance must lie in (0, 1e-4], got {tol}")));
    }
    if nu.is_nan() || nu < 0.0 || !w.re.is_finite() || !w.im.is_finite() {
        return Err(SpecFunError::Domain(format!("bessel_i requires nu >= 0 and finite w, got nu = {nu}, w = {w}")));
    }
    if w.norm() > I_MAX_MODULUS {
        return Err(SpecFunError::OutOfRange(format!("|w| = {} exceeds {I_MAX_MODULUS}", w.norm())));
    }
    let res = i_eval(nu, w, tol);
    if res.abs_error_estimate <= tol * res.value.norm().max(1.0) {
        Ok(res)
    } else {
        Err(SpecFunError::PrecisionLoss(res))
    }
}

pub(crate) fn i_eval(nu: f64, w: Complex64, tol: f64) -> EvalResult {
    if w.norm() == 0.0 {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        return EvalResult { value: Complex64::new(v, 0.0), abs_error_estimate: 0.0, regime: Regime::Series };
    }
    let accept = |v: Complex64, e: f64| e <= 0.1 * tol * v.norm().max(1.0);

    let (sv, se) = i_series(nu, w);
    if accept(sv, se) {
        return EvalResult { value: sv, abs_error_estimate: se, regime: Regime::Series };
    }
    let mut best = EvalResult { value: sv, abs_error_estimate: se, regime: Regime::Series };
    if w.norm() >= 12.0 {
        if let Some((av, ae)) = i_asymptotic(nu, w) {
            if accept(av, ae) {
                return EvalResult { value: av, abs_error_estimate: ae, regime: Regime::Asymptotic };
            }
            if ae < best.abs_error_estimate {
                best = EvalResult { value: av, abs_error_estimate: ae, regime: Regime::Asymptotic };
            }
        }
    }
    let (mv, me) = i_miller(nu, w);
    if me < best.abs_error_estimate {
        best = EvalResult { value: mv, abs_error_estimate: me, regime: Regime::Recurrence };
    }
    best
}

fn i_series(nu: f64, w: Complex64) -> (Complex64, f64) {
    let half = 0.5 * w;
    let lead =
        if nu + 1.0 < 150.0 { (nu * half.ln()).exp() / gamma_unchecked(nu + 1.0) } else { (nu * half.ln() - ln_gamma(nu + 1.0)).exp() };
    let q = half * half;
    let mut term = lead;
    let mut sum = lead;
    let mut max_term = lead.norm();
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        max_term = max_term.max(term.norm());
        if term.norm() <= 1e-17 * sum.norm() && k as f64 > half.norm() {
            break;
        }
        if k > 2000 {
            return (sum, f64::INFINITY);
        }
    }
    let err = term.norm() + 4.0 * EPS * max_term * (k as f64).sqrt() + EPS * sum.norm();
    (sum, err)
}

/// Large-|w| expansion, valid for |arg w| ≤ π/2.
fn i_asymptotic(nu: f64, w: Complex64) -> Option<(Complex64, f64)> {
    let mu4 = 4.0 * nu * nu;
    let inv = 1.0 / w;
    let mut a = Complex64::new(1.0, 0.0); // a_k / w^k
    let mut s_plus = a; // Σ (−1)^k a_k / w^k
    let mut s_minus = a; // Σ a_k / w^k
    let mut last = 1.0f64;
    let mut converged = false;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        let next = a * ((mu4 - odd * odd) / (8.0 * k as f64)) * inv;
        if next.norm() > a.norm() && k > 1 {
            last = a.norm();
            break;
        }
        a = next;
        if k % 2 == 1 {
            s_plus -= a;
        } else {
            s_plus += a;
        }
        s_minus += a;
        last = a.norm();
        if a.norm() < 1e-17 {
            converged = true;
            break;
        }
    }
    let pref = 1.0 / (2.0 * std::f64::consts::PI * w).sqrt();
    let e_pos = w.exp();
    let e_neg = (-w).exp();
    // the second exponential carries ± i e^{±iπν}; sign chosen by the half-plane of w
    let sign = if w.im >= 0.0 { 1.0 } else { -1.0 };
    let rot = Complex64::new(0.0, sign) * Complex64::from_polar(1.0, sign * std::f64::consts::PI * nu);
    let value = pref * (e_pos * s_plus + rot * e_neg * s_minus);
    let trunc = if converged { 0.0 } else { last };
    let scale = pref.norm() * (e_pos.norm() + e_neg.norm());
    let err = scale * (trunc + 8.0 * EPS * (1.0 + w.im.abs()));
    if !err.is_finite() {
        return None;
    }
    Some((value, err))
}

/// Backward recurrence normalised by (w/2)^μ = Σ (−1)^i (μ+2i) Γ(μ+i)/i! I_{μ+2i}(w).
fn i_miller(nu: f64, w: Complex64) -> (Complex64, f64) {
    let order = nu.floor();
    let mu = nu - order;
    let target = order as usize;
    let span = order.max(w.norm());
    let m_start = (span + (400.0 * span.max(1.0)).sqrt() + 20.0).ceil() as usize;
    let m_start = m_start + (m_start % 2);
    let i_top = m_start / 2;
    let mut g = (ln_gamma(mu + i_top as f64) - ln_gamma(i_top as f64 + 1.0)).exp();
    let inv = 1.0 / w;

    let mut i_next = Complex64::new(0.0, 0.0);
    let mut i_cur = Complex64::new(1e-30, 0.0);
    let mut norm = Complex64::new(0.0, 0.0);
    let mut norm_abs = 0.0f64;
    let mut stored = if target == m_start { i_cur } else { Complex64::new(0.0, 0.0) };
    let alt = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut k = m_start;
    {
        let c = (mu + k as f64) * g * alt(i_top);
        norm += c * i_cur;
        norm_abs += (c * i_cur).norm();
    }
    while k > 0 {
        let i_prev = 2.0 * (mu + k as f64) * inv * i_cur + i_next;
        i_next = i_cur;
        i_cur = i_prev;
        k -= 1;
        if k == target {
            stored = i_cur;
        }
        if k.is_multiple_of(2) {
            let i = k / 2;
            let c = if i == 0 {
                gamma_unchecked(mu + 1.0)
            } else {
                g *= (i as f64 + 1.0) / (mu + i as f64);
                (mu + 2.0 * i as f64) * g * alt(i)
            };
            norm += c * i_cur;
            norm_abs += (c * i_cur).norm();
        }
        if i_cur.norm() > 1e250 {
            let s = 1e-250;
            i_cur *= s;
            i_next *= s;
            norm *= s;
            norm_abs *= s;
            stored *= s;
        }
    }
    let scale = (mu * (0.5 * w).ln()).exp() / norm;
    let value = stored * scale;
    let cancel = norm_abs / norm.norm();
    let err = value.norm() * EPS * (8.0 * cancel + 4.0 * (m_start as f64).sqrt()) + 1e-300;
    (value, err)
}

/// e^{−x} I_ν(x) for real x ≥ 0 of any size; no overflow.
///
/// Every series term is positive, so the sum is free of cancellation.
pub fn bessel_i_scaled_real(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let log_lead = nu * half.ln() - ln_gamma(nu + 1.0) - x;
    // terms peak near k ≈ (sqrt(ν² + x²) − ν)/2; sum relative to the peak
    let q = half * half;
    let peak_k = ((nu * nu + x * x).sqrt() - nu) * 0.5;
    let mut log_term = log_lead;
    let mut k = 0usize;
    while (k as f64) < peak_k.floor() {
        k += 1;
        log_term += (q / (k as f64 * (nu + k as f64))).ln();
    }
    let log_peak = log_term;
    // sum downward from the peak and upward from the peak in units of the peak term
    let mut sum = 1.0f64;
    let mut t = 1.0f64;
    let mut j = k;
    while j > 0 {
        t *= (j as f64 * (nu + j as f64)) / q;
        sum += t;
        j -= 1;
        if t < 1e-18 * sum {
            break;
        }
    }
    let mut t = 1.0f64;
    let mut j = k;
    loop {
        j += 1;
        t *= q / (j as f64 * (nu + j as f64));
        sum += t;
        if t < 1e-18 * sum {
            break;
        }
    }
    (log_peak + sum.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j::j_value;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn known_values() {
        let r = bessel_i(0.0, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(r.value, c(1.0, 0.0));
        let r = bessel_i(0.5, c(1.0, 0.0), 1e-10).unwrap();
        assert!((r.value.re - 0.937_674_888_245_487_6).abs() < 1e-14);
        assert!((r.value.re - (2.0 / PI).sqrt() * 1f64.sinh()).abs() < 1e-14);
        let r = bessel_i(1.0, c(0.0, 2.0), 1e-10).unwrap();
        assert!((r.value - c(0.0, 0.576_724_807_756_873_4)).norm() < 1e-13);
    }

    #[test]
    fn bridge_to_j_on_imaginary_axis() {
        for &nu in &[0.0, 0.7, 2.5, 6.3, 10.0] {
            let mut x = 0.0;
            while x <= 40.0 {
                let i = bessel_i(nu, c(0.0, x), 1e-10).unwrap().value;
                let j = j_value(nu, x);
                let expect = Complex64::from_polar(1.0, 0.5 * PI * nu) * j;
                assert!((i - expect).norm() <= 1e-8 * (1.0 + j.abs()), "nu = {nu}, x = {x}: {i} vs {expect}");
                x += 0.73;
            }
        }
    }

    #[test]
    fn routes_agree_for_complex_arguments() {
        for &nu in &[0.0, 1.3, 2.7] {
            for &w in &[c(3.0, -14.0), c(0.5, 20.0), c(6.0, -25.0)] {
                let (s, se) = i_series(nu, w);
                let (m, me) = i_miller(nu, w);
                let (a, ae) = i_asymptotic(nu, w).unwrap();
                let tol = 1e-9 * m.norm().max(1.0);
                assert!(me < tol);
                assert!((m - a).norm() < tol.max(ae * 10.0), "nu = {nu} w = {w}: {m} vs {a}");
                if se < tol {
                    assert!((s - m).norm() < tol);
                }
            }
        }
    }

    #[test]
    fn scaled_real_matches_series() {
        for &nu in &[0.0, 0.5, 3.3, 40.0] {
            for &x in &[0.1, 2.0, 15.0, 45.0] {
                let direct = i_series(nu, c(x, 0.0)).0.re * (-x).exp();
                let scaled = bessel_i_scaled_real(nu, x);
                assert!(((direct - scaled) / direct).abs() < 1e-12, "nu = {nu}, x = {x}");
            }
        }
        // e^{-x} I_{1/2}(x) = (1 − e^{−2x}) / sqrt(2πx)
        let x = 5000.0;
        let nu = 0.5;
        let approx = 1.0 / (2.0 * PI * x).sqrt();
        assert!(((bessel_i_scaled_real(nu, x) - approx) / approx).abs() < 1e-10);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(bessel_i(1.0, c(61.0, 0.0), 1e-8), Err(SpecFunError::OutOfRange(_))));
    }
}
