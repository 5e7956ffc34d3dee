//! Integral representation of I_ν for Re w ≥ 0:
//!
//! I_ν(w) = (1/π)∫₀^π e^{w cos s} cos(νs) ds − (sin νπ/π)∫₀^∞ e^{−w cosh s − νs} ds.
//!
//! On the imaginary axis the second integrand only decays like e^{−νs} while
//! oscillating ever faster, so the path is rotated: up the imaginary axis to
//! iθ with θ = −arg w, then parallel to the real axis, where the integrand
//! decays double exponentially. The function is entire and decays in the
//! swept strip, so the value is unchanged.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{bessel_i, EvalResult, Regime, SpecFunError};
use crate::quadrature::adaptive;

const MAX_INTERVALS: usize = 4000;

/// I_ν(w) by quadrature of the integral representation, independent of the
/// series and recurrence routes.
pub fn i_integral_representation(nu: f64, w: Complex64, tol: f64) -> Result<EvalResult, SpecFunError> {
    if nu.is_nan() || nu < 0.0 || !(tol > 0.0) {
        return Err(SpecFunError::Domain(format!("need nu >= 0 and tol > 0, got nu = {nu}, tol = {tol}")));
    }
    if w.re < -1e-14 * w.norm().max(1.0) {
        return Err(SpecFunError::Domain(format!("integral representation needs Re w >= 0, got {w}")));
    }
    let scale = w.re.max(0.0).exp().max(1.0);
    let abs_tol = 0.1 * tol * scale;

    let first = adaptive(|s| (w * s.cos()).exp() * (nu * s).cos(), 0.0, PI, abs_tol * PI, MAX_INTERVALS);
    let mut value = first.value / PI;
    let mut err = first.error / PI;
    let mut converged = first.converged;

    let frac = nu - nu.round();
    let sin_nu_pi = if frac == 0.0 { 0.0 } else { (PI * frac).sin() * if (nu.round() as i64) % 2 == 0 { 1.0 } else { -1.0 } };
    if sin_nu_pi != 0.0 {
        let second = second_integral(nu, w, abs_tol * PI / sin_nu_pi.abs())?;
        value -= sin_nu_pi / PI * second.value;
        err += sin_nu_pi.abs() / PI * second.error;
        converged &= second.converged;
    }
    let res = EvalResult { value, abs_error_estimate: err, regime: Regime::Quadrature };
    if converged {
        Ok(res)
    } else {
        Err(SpecFunError::PrecisionLoss(res))
    }
}

/// ∫₀^∞ e^{−w cosh s − νs} ds along the rotated path.
fn second_integral(nu: f64, w: Complex64, abs_tol: f64) -> Result<crate::quadrature::Adaptive, SpecFunError> {
    if w.norm() == 0.0 {
        if nu == 0.0 {
            return Err(SpecFunError::Domain("second integral diverges for nu = 0, w = 0".into()));
        }
        return Ok(crate::quadrature::Adaptive { value: Complex64::new(1.0 / nu, 0.0), error: 0.0, converged: true });
    }
    let theta = -w.arg();
    let i = Complex64::new(0.0, 1.0);
    let half_tol = 0.5 * abs_tol;

    let vertical = if theta.abs() > 0.0 {
        // θ < 0 is fine: the rule works on signed intervals
        adaptive(|v| i * (-w * v.cos()).exp() * Complex64::from_polar(1.0, -nu * v), 0.0, theta, half_tol, MAX_INTERVALS)
    } else {
        crate::quadrature::Adaptive { value: Complex64::new(0.0, 0.0), error: 0.0, converged: true }
    };

    // on the horizontal leg Re(w cosh(u+iθ)) = |w|(cosh u cos²θ + sinh u sin²θ) ≥ 0
    let mag = w.norm();
    let c2 = theta.cos().powi(2);
    let s2 = theta.sin().powi(2);
    let target = (1.0 / half_tol.min(1e-3)).ln() + 5.0;
    let mut u_max = 1.0f64;
    while mag * (u_max.cosh() * c2 + u_max.sinh() * s2) + nu * u_max < target {
        u_max *= 1.5;
        if u_max > 1e4 {
            return Err(SpecFunError::Domain("second integral does not decay".into()));
        }
    }
    let shift = Complex64::new(0.0, theta);
    let horizontal = adaptive(
        |u| {
            let s = Complex64::new(u, 0.0) + shift;
            (-w * s.cosh() - nu * s).exp()
        },
        0.0,
        u_max,
        half_tol,
        MAX_INTERVALS,
    );
    Ok(crate::quadrature::Adaptive {
        value: vertical.value + horizontal.value,
        error: vertical.error + horizontal.error,
        converged: vertical.converged && horizontal.converged,
    })
}

/// |quadrature of the integral representation − bessel_i(ν, w)|, or +∞ when
/// the quadrature does not converge.
pub fn verify_i_integral_representation(nu: f64, w: Complex64, tol: f64) -> Result<f64, SpecFunError> {
    if !(nu > 0.0) {
        return Err(SpecFunError::Domain(format!("need nu > 0, got {nu}")));
    }
    if w.norm() > 40.0 {
        return Err(SpecFunError::OutOfRange(format!("|w| = {} exceeds 40", w.norm())));
    }
    let quad = match i_integral_representation(nu, w, tol) {
        Ok(r) => r.value,
        Err(SpecFunError::PrecisionLoss(_)) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let reference = bessel_i(nu, w, tol.min(1e-4))?;
    Ok((quad - reference.value).norm())
}
