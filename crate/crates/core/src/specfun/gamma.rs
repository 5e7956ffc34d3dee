//! Gamma function by the Lanczos approximation (g = 7, nine coefficients).

use super::SpecFunError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which `gamma` is evaluated without overflow.
pub const GAMMA_MAX_ARG: f64 = 170.0;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original minus one)
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for 0 < x ≤ 170.
pub fn gamma(x: f64) -> Result<f64, SpecFunError> {
    if x.is_nan() || x <= 0.0 {
        return Err(SpecFunError::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x > GAMMA_MAX_ARG {
        return Err(SpecFunError::Overflow(format!("gamma({x}) exceeds f64 range")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum on its accurate half-line
        return gamma_unchecked(x + 1.0) / x;
    }
    if x.fract() == 0.0 && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let sum = lanczos_sum(z);
    if x < 140.0 {
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
    } else {
        // split the power to stay inside f64 range
        let half = t.powf((z + 0.5) / 2.0);
        (2.0 * std::f64::consts::PI).sqrt() * half * ((-t).exp() * half) * sum
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    if x < 15.0 {
        return gamma_unchecked(x).ln();
    }
    // Stirling series; the terms below are far under f64 resolution beyond x = 15
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}
