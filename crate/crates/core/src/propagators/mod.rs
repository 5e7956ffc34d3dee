//! Propagator kernels on the cone and the decay bounds they are compared to.

use serde::Serialize;

use crate::cross_section::{ConeModel, SpectralMode};
use crate::error::{ConeError, Result};

pub mod halfwave;
pub mod heat;
pub mod poisson;
pub mod schrodinger;

pub use crate::spectral_calculus::KernelQuery;
pub use halfwave::{halfwave_bound, halfwave_localized_kernel, halfwave_samples};
pub use heat::{
    calibrate_heat, cone_distance, heat_bound, heat_floor, heat_kernel, heat_kernel_value, HeatConstants, HEAT_RESOLVED_FLOORS,
};
pub use poisson::{poisson_bound, poisson_wave_kernel, PoissonSign, POISSON_DELTA};
pub use schrodinger::{
    default_comparison_samples, epsilon_limit, schrodinger_kernel, schrodinger_kernel_integral_form, schrodinger_kernel_with,
    schrodinger_mode_sum, schrodinger_prefactor, weber_identity_residual, weber_lhs,
};

/// |kernel| against a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub kernel_abs: f64,
    pub bound_value: f64,
    pub ratio: f64,
}

impl BoundReport {
    pub fn new(kernel_abs: f64, bound_value: f64) -> Result<Self> {
        if !(kernel_abs >= 0.0 && bound_value > 0.0 && bound_value.is_finite()) {
            return Err(ConeError::Domain(format!("bad bound report: |K| = {kernel_abs}, bound = {bound_value}")));
        }
        Ok(BoundReport { kernel_abs, bound_value, ratio: kernel_abs / bound_value })
    }
}

/// |t|^{−n/2}·z^α for z ≤ 1 and |t|^{−n/2} for z > 1, with α = ν₀ − (n−2)/2.
pub fn dispersive_bound(model: &ConeModel, q: &KernelQuery) -> Result<f64> {
    if q.t == 0.0 {
        return Err(ConeError::Domain("the dispersive bound needs t != 0".into()));
    }
    let base = q.t.abs().powf(-0.5 * model.n as f64);
    let z = q.z();
    Ok(if z <= 1.0 { base * z.powf(model.alpha) } else { base })
}

/// Modes with ν < (n−2)/2 and the rest.
pub fn split_projection(modes: &[SpectralMode], n: usize) -> (Vec<SpectralMode>, Vec<SpectralMode>) {
    let threshold = 0.5 * (n as f64 - 2.0);
    modes.iter().cloned().partition(|m| m.nu < threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{build_spectrum, CrossSectionSpec, YPoint};

    fn torus(a: f64) -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), a).unwrap()
    }

    fn query(t: f64, r1: f64, r2: f64) -> KernelQuery {
        let y = YPoint::angles(&[0.0, 0.0]);
        KernelQuery::new(t, r1, y.clone(), r2, y).unwrap()
    }

    #[test]
    fn dispersive_bound_examples() {
        let m = torus(0.0);
        let q = query(2.0, 2.0, 2.0);
        assert!((q.z() - 1.0).abs() < 1e-15);
        assert!((dispersive_bound(&m, &q).unwrap() - 2f64.powf(-1.5)).abs() < 1e-15);
        for (r1, r2) in [(0.01, 0.02), (5.0, 9.0)] {
            let b = dispersive_bound(&m, &query(1.0, r1, r2)).unwrap();
            assert!((b - 1.0).abs() < 1e-15);
        }
        let m = torus(0.25 * 0.25 - 0.25);
        assert!((m.nu0 - 0.25).abs() < 1e-12);
        let q = query(1.0, 0.1, 0.2);
        assert!((q.z() - 0.01).abs() < 1e-15);
        let ratio = dispersive_bound(&m, &q).unwrap();
        assert!((ratio - 0.01f64.powf(-0.25)).abs() < 1e-12);
        assert!(dispersive_bound(&m, &query(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn projection_split() {
        let modes = build_spectrum(&torus(0.0), 5.0).unwrap();
        let (low, high) = split_projection(&modes, 3);
        assert!(low.is_empty());
        assert_eq!(high.len(), modes.len());
        let modes = build_spectrum(&torus(-0.2), 5.0).unwrap();
        let (low, high) = split_projection(&modes, 3);
        assert_eq!(low.len(), 1);
        assert_eq!(low[0].index, 0);
        assert_eq!(low.len() + high.len(), modes.len());
        assert!(high.iter().all(|m| m.nu >= 0.5));
    }

    #[test]
    fn bound_report_ratio() {
        let r = BoundReport::new(3.0, 4.0).unwrap();
        assert_eq!(r.ratio, 0.75);
        assert!(BoundReport::new(1.0, 0.0).is_err());
    }
}
