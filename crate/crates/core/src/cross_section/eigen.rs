//! Spherical harmonics: Gegenbauer zonal projectors on S^d and individual
//! complex harmonics Y_ℓ^m on S².

use std::f64::consts::PI;

use num_complex::Complex64;

/// Dimension of the degree-ℓ harmonic space on S^d.
pub fn harmonic_multiplicity(dim: usize, degree: usize) -> usize {
    let binom = |n: usize, k: usize| -> u128 {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    };
    let top = binom(degree + dim, dim);
    let low = if degree >= 2 { binom(degree + dim - 2, dim) } else { 0 };
    (top - low) as usize
}

/// R_ℓ(x) for ℓ = 0..=l_max: Gegenbauer polynomials of index (d−1)/2
/// normalised by R_ℓ(1) = 1. For d = 1 these are Chebyshev polynomials.
pub fn zonal_polynomials(dim: usize, l_max: usize, x: f64) -> Vec<f64> {
    let lambda = 0.5 * (dim as f64 - 1.0);
    let mut r = Vec::with_capacity(l_max + 1);
    r.push(1.0);
    if l_max >= 1 {
        r.push(x);
    }
    for l in 1..l_max {
        let lf = l as f64;
        let next = (2.0 * (lf + lambda) * x * r[l] - lf * r[l - 1]) / (2.0 * lambda + lf);
        r.push(next);
    }
    r
}

/// Fully normalised associated Legendre values P̄_ℓ^m(cos θ) for ℓ ∈ [m, l_max],
/// with ∫_{S²} |P̄_ℓ^m e^{imφ}|² = 1 and the Condon–Shortley phase.
pub fn normalized_legendre_column(m: usize, l_max: usize, theta: f64) -> Vec<f64> {
    let (s, x) = theta.sin_cos();
    let mut out = Vec::with_capacity(l_max + 1 - m);
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    out.push(pmm);
    if l_max == m {
        return out;
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
    out.push(cur);
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let a_prev = ((4.0 * (lf - 1.0) * (lf - 1.0) - 1.0) / ((lf - 1.0) * (lf - 1.0) - mf * mf)).sqrt();
        let next = a * (x * cur - prev / a_prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Y_ℓ^m(θ, φ) on the unit sphere S², m ∈ [−ℓ, ℓ].
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| must not exceed l");
    let p = *normalized_legendre_column(am, l, theta).last().unwrap();
    let y = Complex64::from_polar(p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn multiplicities() {
        for l in 0..20 {
            assert_eq!(harmonic_multiplicity(2, l), 2 * l + 1);
            assert_eq!(harmonic_multiplicity(3, l), (l + 1) * (l + 1));
            assert_eq!(harmonic_multiplicity(1, l), if l == 0 { 1 } else { 2 });
        }
    }

    #[test]
    fn zonal_matches_legendre_and_chebyshev() {
        let x = 0.37;
        let r = zonal_polynomials(2, 3, x);
        assert!((r[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((r[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        let t = zonal_polynomials(1, 5, x);
        assert!((t[5] - (5.0 * x.acos()).cos()).abs() < 1e-14);
        for d in 1..6 {
            let r = zonal_polynomials(d, 250, 1.0);
            assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-10));
            let r = zonal_polynomials(d, 250, 0.3);
            assert!(r.iter().all(|v| v.abs() <= 1.0 + 1e-10));
        }
    }

    #[test]
    fn addition_theorem() {
        // Σ_m Y_ℓ^m(a) conj Y_ℓ^m(b) = (2ℓ+1)/(4π) P_ℓ(cos γ)
        let (t1, p1, t2, p2) = (0.4f64, 1.1f64, 2.2f64, -0.7f64);
        let cos_g = t1.cos() * t2.cos() + t1.sin() * t2.sin() * (p1 - p2).cos();
        for l in [0usize, 1, 5, 30, 90] {
            let mut s = Complex64::new(0.0, 0.0);
            for m in -(l as i64)..=(l as i64) {
                s += spherical_harmonic(l, m, t1, p1) * spherical_harmonic(l, m, t2, p2).conj();
            }
            let zonal = zonal_polynomials(2, l, cos_g)[l];
            let expect = (2 * l + 1) as f64 / (4.0 * PI) * zonal;
            assert!((s - expect).norm() < 1e-11 * (l as f64 + 1.0), "l = {l}: {s} vs {expect}");
        }
    }

    #[test]
    fn orthonormal_on_product_grid() {
        let lmax = 12;
        let gl = GaussLegendre::new(lmax + 2);
        let nphi = 2 * lmax + 3;
        let basis: Vec<(usize, i64)> = (0..=lmax).flat_map(|l| (-(l as i64)..=(l as i64)).map(move |m| (l, m))).collect();
        let nb = basis.len();
        let mut acc = vec![Complex64::new(0.0, 0.0); nb * nb];
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let theta = x.acos();
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                let wt = w * 2.0 * PI / nphi as f64;
                let vals: Vec<Complex64> = basis.iter().map(|&(l, m)| spherical_harmonic(l, m, theta, phi)).collect();
                for i in 0..nb {
                    for j in 0..nb {
                        acc[i * nb + j] += vals[i] * vals[j].conj() * wt;
                    }
                }
            }
        }
        for (k, v) in acc.into_iter().enumerate() {
            let (i, j) = (k / nb, k % nb);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-12, "{:?} {:?}: {v}", basis[i], basis[j]);
        }
    }
}
