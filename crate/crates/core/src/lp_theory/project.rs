//! φ_j(√H) on arbitrary gridded profiles.

use std::sync::Arc;

use num_complex::Complex64;

use super::cutoff::DyadicCutoff;
use crate::error::{ConeError, Result};
use crate::spectral_calculus::{ModeCoefficients, RadialGrid};

/// Largest share of ‖φ_j f‖² allowed on the outer tenth of the grid.
pub const PROJECTION_TAIL_MASS: f64 = 1e-8;

/// H_ν[φ_j·H_ν c_k] for every component, with the spectral side on `rho_grid`.
/// Fails when the projection spreads past the grid, as it does for scales
/// much coarser than the grid length.
pub fn lp_project_with(f: &ModeCoefficients, cutoff: &DyadicCutoff, j: i32, rho_grid: &Arc<RadialGrid>) -> Result<ModeCoefficients> {
    let out = f.apply_function(rho_grid, |rho| Complex64::new(cutoff.at(j, rho), 0.0))?;
    let edge = 0.9 * out.grid.r_max;
    let (mut outer, mut total) = (0.0, 0.0);
    for c in &out.components {
        for ((v, r), w) in c.profile.iter().zip(&out.grid.nodes).zip(&out.grid.weights) {
            total += w * v.norm_sqr();
            if *r > edge {
                outer += w * v.norm_sqr();
            }
        }
    }
    if outer > PROJECTION_TAIL_MASS * total {
        return Err(ConeError::ProfileNotResolved(format!(
            "projection at scale {j} keeps {:.3e} of its mass beyond r = {edge}",
            outer / total
        )));
    }
    Ok(out)
}

/// φ_j(√H)f with the standard cutoff.
pub fn lp_project(f: &ModeCoefficients, j: i32, rho_grid: &Arc<RadialGrid>) -> Result<ModeCoefficients> {
    lp_project_with(f, &DyadicCutoff::standard(), j, rho_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{ConeModel, CrossSectionSpec};

    fn from_spectrum(template: &ModeCoefficients, shape: impl Fn(f64) -> f64) -> ModeCoefficients {
        let mut spectral = template.clone();
        for c in &mut spectral.components {
            let a = c.profile[0];
            for (v, rho) in c.profile.iter_mut().zip(&template.grid.nodes) {
                *v = a * shape(*rho);
            }
        }
        spectral.hankel(&template.grid).unwrap()
    }

    #[test]
    fn narrow_band_is_fixed_and_commutes_with_the_flow() {
        let m = ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap();
        let grid = Arc::new(RadialGrid::standard(3));
        let f = ModeCoefficients::random_gaussians(&m, &grid, 1.2, 3).unwrap();
        // a narrow log-Gaussian at ρ = 8, inside the plateau of φ_3 up to 1e−9
        let g = from_spectrum(&f, |rho| (-0.5 * ((rho.log2() - 3.0) / 0.065).powi(2)).exp());
        let p = lp_project_with(&g, &DyadicCutoff::plateau(), 3, &grid).unwrap();
        let peak = g.components.iter().flat_map(|c| c.profile.iter()).map(|v| v.norm()).fold(0.0, f64::max);
        assert!(g.max_deviation(&p) < 1e-6 * peak);

        let h = from_spectrum(&f, |rho| (-(rho - 16.0).powi(2) / 8.0).exp());
        let flow = |h: &ModeCoefficients| h.apply_function(&grid, |rho| Complex64::from_polar(1.0, 0.5 * rho * rho)).unwrap();
        let a = lp_project(&flow(&h), 4, &grid).unwrap();
        let b = flow(&lp_project(&h, 4, &grid).unwrap());
        let scale = a.components.iter().flat_map(|c| c.profile.iter()).map(|v| v.norm()).fold(0.0, f64::max);
        assert!(a.max_deviation(&b) < 1e-5 * scale, "{}", a.max_deviation(&b));
        assert!(lp_project(&f, -2, &grid).is_err());
    }
}
