//! Frequency-localized half-wave kernels φ(2^{−j}√H)e^{it√H}(z₁, z₂).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cross_section::{geodesic_distance, sample_pairs, ConeModel};
use crate::error::{ConeError, Result};
use crate::lp_theory::DyadicCutoff;
use crate::spectral_calculus::{kernel_of_function, KernelQuery, Multiplier};

/// Largest |t|·2^j accepted.
pub const MAX_PHASE: f64 = 1e3;

/// The kernel of φ(2^{−j}√H)e^{it√H}, with q.t as the time.
pub fn halfwave_localized_kernel(model: &ConeModel, j: i32, q: &KernelQuery, tol: f64) -> Result<Complex64> {
    let scale = (j as f64).exp2();
    if q.t.abs() * scale > MAX_PHASE {
        return Err(ConeError::Domain(format!("|t| 2^j = {} exceeds {MAX_PHASE}", q.t.abs() * scale)));
    }
    let phi = DyadicCutoff::standard();
    let (lo, hi) = phi.support(j);
    let t = q.t;
    let f = Multiplier::compact(move |rho| Complex64::from_polar(phi.at(j, rho), t * rho), lo, hi, 1.0, t.abs())?;
    kernel_of_function(model, &f, q, tol)
}

/// 2^{jn}(1 + 2^j|t|)^{−(n−1)/2}.
pub fn halfwave_bound(n: usize, j: i32, t: f64) -> f64 {
    let s = (j as f64).exp2();
    s.powi(n as i32) * (1.0 + s * t.abs()).powf(-0.5 * (n as f64 - 1.0))
}

/// Sample points for the spatial sup at time t: r₁ = 1 and r₂ within
/// s·2^{−j}, s ∈ {−1, −½, 0, ½, 1}, of the coincidence r₂ = r₁, of the
/// tip-diffracted front r₁ + r₂ = |t| and of the direct front at cone
/// distance |t|, over the standard Y pairs.
pub fn halfwave_samples(model: &ConeModel, j: i32, t: f64) -> Result<Vec<KernelQuery>> {
    let h = (-j as f64).exp2();
    let t_abs = t.abs();
    let mut out = Vec::new();
    for (y1, y2) in sample_pairs(&model.spec) {
        let mut centres = vec![1.0, t_abs - 1.0];
        if let Ok(d) = geodesic_distance(&model.spec, &y1, &y2) {
            if d < PI && t_abs >= d.sin() {
                centres.push(d.cos() + (t_abs * t_abs - d.sin().powi(2)).sqrt());
            }
        }
        for c in centres {
            for s in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                let r2 = c + s * h;
                if r2 > 0.0 {
                    out.push(KernelQuery::new(t, 1.0, y1.clone(), r2, y2.clone())?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{CrossSectionSpec, YPoint};

    fn torus11() -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn time_zero_kernel_is_hermitian() {
        let m = torus11();
        let q = KernelQuery::new(0.0, 0.7, YPoint::angles(&[0.1, 0.4]), 1.2, YPoint::angles(&[1.5, 2.0])).unwrap();
        let a = halfwave_localized_kernel(&m, 1, &q, 1e-9).unwrap();
        let b = halfwave_localized_kernel(&m, 1, &q.swapped(), 1e-9).unwrap();
        assert!((a - b.conj()).norm() < 1e-9 * a.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn short_time_sup_scales_like_the_volume_factor() {
        let m = torus11();
        let mut constants = Vec::new();
        for j in 0..3 {
            let h = (-j as f64).exp2();
            let sup = halfwave_samples(&m, j, 0.5 * h)
                .unwrap()
                .iter()
                .map(|q| halfwave_localized_kernel(&m, j, q, 1e-8).unwrap().norm())
                .fold(0.0, f64::max);
            constants.push(sup / halfwave_bound(3, j, 0.0));
        }
        let (lo, hi) = constants.iter().fold((f64::INFINITY, 0.0f64), |(a, b), c| (a.min(*c), b.max(*c)));
        assert!(hi / lo < 3.0, "{constants:?}");
        assert!(halfwave_localized_kernel(
            &m,
            2,
            &KernelQuery::new(300.0, 1.0, YPoint::angles(&[0.0, 0.0]), 1.0, YPoint::angles(&[0.0, 0.0])).unwrap(),
            1e-8
        )
        .is_err());
    }

    /// (2π²d)^{−1}∫φ_j(ρ)e^{itρ} sin(ρd) ρ dρ, the kernel on flat R³.
    fn euclidean(j: i32, t: f64, d: f64) -> Complex64 {
        let phi = DyadicCutoff::standard();
        let (lo, hi) = phi.support(j);
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        // the integrand vanishes to all orders at both ends
        let sum: Complex64 = (1..n)
            .map(|i| {
                let rho = lo + i as f64 * h;
                Complex64::from_polar(phi.at(j, rho) * (rho * d).sin() * rho, t * rho)
            })
            .sum();
        sum * h / (2.0 * PI * PI * d)
    }

    #[test]
    fn cone_over_the_unit_sphere_is_flat_space() {
        let m = ConeModel::new(3, CrossSectionSpec::sphere(2, 1.0).unwrap(), 0.0).unwrap();
        let (y1, y2) = (YPoint::sphere_angles(0.3, 0.0), YPoint::sphere_angles(1.0, 0.8));
        let cos_gamma: f64 = y1.coords.iter().zip(&y2.coords).map(|(a, b)| a * b).sum();
        for (j, t, r1, r2) in [(1, 1.5, 1.0, 2.0), (1, 4.0, 1.0, 4.2), (2, 0.7, 0.6, 1.1)] {
            let d = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * cos_gamma).sqrt();
            let k = halfwave_localized_kernel(&m, j, &KernelQuery::new(t, r1, y1.clone(), r2, y2.clone()).unwrap(), 1e-10).unwrap();
            let e = euclidean(j, t, d);
            assert!((k - e).norm() < 1e-7 * halfwave_bound(3, j, t), "j {j} t {t}: {k} vs {e}");
        }
    }
}
