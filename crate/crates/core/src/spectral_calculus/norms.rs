//! Functions on the cone as mode expansions f = Σ c_k(r)φ_k(y), their
//! transforms and their Lebesgue norms on product grids.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{ConeGrid, RadialGrid};
use super::hankel::{check_tail, hankel_transform_many, radial_norm_sq};
use crate::cross_section::{build_spectrum, ConeModel, SpectralMode, YGrid};
use crate::error::{ConeError, Result};

/// One eigenfunction φ = (mode, label) with its radial profile.
#[derive(Debug, Clone)]
pub struct ModeComponent {
    pub mode: SpectralMode,
    pub label: usize,
    pub profile: Vec<Complex64>,
}

/// Per-eigenfunction radial profiles on a shared grid. The same type holds
/// spectral-side data (profiles in ρ) after a Hankel transform.
#[derive(Debug, Clone)]
pub struct ModeCoefficients {
    pub grid: Arc<RadialGrid>,
    pub components: Vec<ModeComponent>,
}

impl ModeCoefficients {
    /// Σ_k ∫|c_k|² r^{n−1} dr.
    pub fn l2_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| radial_norm_sq(&c.profile, &self.grid)).sum()
    }

    /// Componentwise Hankel transform H_{ν_k} onto `out`.
    pub fn hankel(&self, out: &Arc<RadialGrid>) -> Result<ModeCoefficients> {
        let mut profiles: Vec<Option<Vec<Complex64>>> = vec![None; self.components.len()];
        let mut done = vec![false; self.components.len()];
        for i in 0..self.components.len() {
            if done[i] {
                continue;
            }
            let nu = self.components[i].mode.nu;
            let group: Vec<usize> = (i..self.components.len()).filter(|&j| self.components[j].mode.nu == nu).collect();
            let inputs: Vec<Vec<Complex64>> = group.iter().map(|&j| self.components[j].profile.clone()).collect();
            let outs = hankel_transform_many(nu, &inputs, &self.grid, out)?;
            for (j, o) in group.into_iter().zip(outs) {
                done[j] = true;
                profiles[j] = Some(o);
            }
        }
        let components = self
            .components
            .iter()
            .zip(profiles)
            .map(|(c, p)| ModeComponent { mode: c.mode.clone(), label: c.label, profile: p.unwrap() })
            .collect();
        Ok(ModeCoefficients { grid: out.clone(), components })
    }

    /// Pointwise multiplication of every profile by m(node).
    pub fn multiply(&self, m: impl Fn(f64) -> Complex64) -> ModeCoefficients {
        let factors: Vec<Complex64> = self.grid.nodes.iter().map(|r| m(*r)).collect();
        let mut out = self.clone();
        for c in &mut out.components {
            for (v, f) in c.profile.iter_mut().zip(&factors) {
                *v *= f;
            }
        }
        out
    }

    /// F(√H)f = H_ν[F·H_ν c_k] per component, with the spectral side sampled
    /// on `rho_grid`.
    pub fn apply_function(&self, rho_grid: &Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Result<ModeCoefficients> {
        self.hankel(rho_grid)?.multiply(f).hankel(&self.grid)
    }

    pub fn scaled(&self, s: Complex64) -> ModeCoefficients {
        self.multiply(|_| s)
    }

    /// Largest pointwise deviation between matching profiles.
    pub fn max_deviation(&self, other: &ModeCoefficients) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.profile.iter().zip(&b.profile).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Values f(r_i, y_l), row-major in (i, l).
    pub fn synthesize(&self, y: &YGrid) -> Result<Vec<Complex64>> {
        let nl = y.len();
        let mut phi = Vec::with_capacity(self.components.len() * nl);
        for c in &self.components {
            for p in &y.points {
                phi.push(c.mode.eval(p, c.label)?);
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len() * nl];
        for (ci, c) in self.components.iter().enumerate() {
            let ph = &phi[ci * nl..(ci + 1) * nl];
            for (i, v) in c.profile.iter().enumerate() {
                if *v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, p) in out[i * nl..(i + 1) * nl].iter_mut().zip(ph) {
                    *o += v * p;
                }
            }
        }
        Ok(out)
    }

    /// Seeded test data: every eigenfunction with ν ≤ nu_max gets a sum of two
    /// order-adapted Gaussians r^{ν−(n−2)/2}e^{−βr²/2}, β ∈ [1, 2], with random
    /// complex amplitudes.
    pub fn random_gaussians(model: &ConeModel, grid: &Arc<RadialGrid>, nu_max: f64, seed: u64) -> Result<Self> {
        let modes = build_spectrum(model, nu_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p0 = 0.5 * (model.n as f64 - 2.0);
        let mut components = Vec::new();
        for m in &modes {
            for label in 0..m.multiplicity {
                let terms: Vec<(Complex64, f64)> = (0..2)
                    .map(|_| {
                        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        (a, rng.gen_range(1.0..2.0))
                    })
                    .collect();
                let profile = grid
                    .nodes
                    .iter()
                    .map(|r| {
                        let base = r.powf(m.nu - p0);
                        terms.iter().map(|(a, b)| a * base * (-0.5 * b * r * r).exp()).sum()
                    })
                    .collect();
                components.push(ModeComponent { mode: m.clone(), label, profile });
            }
        }
        Ok(ModeCoefficients { grid: grid.clone(), components })
    }
}

/// (Σ w |f|^q)^{1/q} over a cone grid; q = ∞ gives the maximum.
pub fn gridded_lq_norm(values: &[Complex64], grid: &ConeGrid, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(ConeError::Domain(format!("Lebesgue exponent must be >= 1, got {q}")));
    }
    if values.len() != grid.len() {
        return Err(ConeError::Domain(format!("{} values for {} grid nodes", values.len(), grid.len())));
    }
    if q.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let nl = grid.y.len();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    // scaled by the peak so that large q cannot overflow
    let mut acc = 0.0;
    for (i, w) in grid.radial.weights.iter().enumerate() {
        let row: f64 = values[i * nl..(i + 1) * nl].iter().zip(&grid.y.weights).map(|(v, wy)| wy * (v.norm() / peak).powf(q)).sum();
        acc += w * row;
    }
    Ok(peak * acc.powf(1.0 / q))
}

/// ‖f‖_{L^q(X)} for a mode expansion, computed on its radial grid times `y`.
pub fn cone_lq_norm(model: &ConeModel, f: &ModeCoefficients, y: &YGrid, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(ConeError::Domain(format!("Lebesgue exponent must be >= 1, got {q}")));
    }
    if f.grid.n != model.n {
        return Err(ConeError::Domain(format!("grid measure is for n = {}, model has n = {}", f.grid.n, model.n)));
    }
    for c in &f.components {
        check_tail(&c.profile, &f.grid)?;
    }
    let values = f.synthesize(y)?;
    gridded_lq_norm(&values, &ConeGrid::new((*f.grid).clone(), y.clone()), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::CrossSectionSpec;
    use std::f64::consts::PI;

    fn torus11() -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap()
    }

    fn gaussian_on_constant_mode(grid: &Arc<RadialGrid>) -> ModeCoefficients {
        let modes = build_spectrum(&torus11(), 0.5).unwrap();
        let profile = grid.nodes.iter().map(|r| Complex64::new((-0.5 * r * r).exp(), 0.0)).collect();
        ModeCoefficients { grid: grid.clone(), components: vec![ModeComponent { mode: modes[0].clone(), label: 0, profile }] }
    }

    #[test]
    fn gaussian_norms_match_closed_forms() {
        let grid = Arc::new(RadialGrid::standard(3));
        let f = gaussian_on_constant_mode(&grid);
        let y = YGrid::torus(&[1.0, 1.0], 4);
        let vol = 4.0 * PI * PI;
        // ∫ e^{−qr²/2} r² dr = (√π/4)(q/2)^{−3/2}
        for q in [1.0f64, 2.0, 3.0, 4.0] {
            let radial = 0.5 * 0.5 * PI.sqrt() * (0.5 * q).powf(-1.5);
            let want = (vol * vol.powf(-0.5 * q) * radial).powf(1.0 / q);
            let got = cone_lq_norm(&torus11(), &f, &y, q).unwrap();
            assert!((got / want - 1.0).abs() < 1e-10, "q {q}: {got} vs {want}");
        }
        let sup = cone_lq_norm(&torus11(), &f, &y, f64::INFINITY).unwrap();
        assert!((sup - vol.powf(-0.5)).abs() < 1e-6);
        assert!(cone_lq_norm(&torus11(), &f, &y, 0.5).is_err());
    }

    #[test]
    fn norm_is_homogeneous_and_grid_stable() {
        let grid = Arc::new(RadialGrid::graded(3, 1024, 20.0).unwrap());
        let f = ModeCoefficients::random_gaussians(&torus11(), &grid, 1.5, 3).unwrap();
        let y = YGrid::torus(&[1.0, 1.0], 8);
        let m = torus11();
        let a = cone_lq_norm(&m, &f, &y, 3.0).unwrap();
        let b = cone_lq_norm(&m, &f.scaled(Complex64::new(2.5, 0.0)), &y, 3.0).unwrap();
        assert!((b - 2.5 * a).abs() < 1e-12 * b);
        // |f|^q is a trigonometric polynomial on Y for even q, so both Y grids are exact there
        let fine = Arc::new(RadialGrid::graded(3, 2048, 24.0).unwrap());
        let g = ModeCoefficients::random_gaussians(&torus11(), &fine, 1.5, 3).unwrap();
        for q in [2.0, 4.0] {
            let a = cone_lq_norm(&m, &f, &y, q).unwrap();
            let c = cone_lq_norm(&m, &g, &YGrid::torus(&[1.0, 1.0], 12), q).unwrap();
            assert!((a - c).abs() < 1e-5 * c, "q {q}: {a} vs {c}");
        }
    }

    #[test]
    fn parseval_on_the_cone() {
        let grid = Arc::new(RadialGrid::standard(3));
        let m = torus11();
        let y = YGrid::torus(&[1.0, 1.0], 8);
        for seed in [1u64, 2] {
            let f = ModeCoefficients::random_gaussians(&m, &grid, 1.5, seed).unwrap();
            let spectral = f.hankel(&grid).unwrap().l2_norm_sq();
            let direct = cone_lq_norm(&m, &f, &y, 2.0).unwrap().powi(2);
            assert!((spectral / direct - 1.0).abs() < 1e-6, "{spectral} vs {direct}");
        }
    }
}
