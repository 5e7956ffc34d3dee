//! Hankel transform of real order on the cone measure,
//! (H_ν f)(ρ) = ∫ (rρ)^{−(n−2)/2} J_ν(rρ) f(r) r^{n−1} dr.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::RadialGrid;
use crate::error::{ConeError, Result};
use crate::specfun::j_value;

/// Relative size a profile may keep on the last tenth of its grid.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Fails unless |f| on r ≥ 0.9·r_max is below 1e−10 of its maximum.
pub fn check_tail(f: &[Complex64], grid: &RadialGrid) -> Result<()> {
    let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let cut = 0.9 * grid.r_max;
    let tail = grid.nodes.iter().zip(f).filter(|(r, _)| **r >= cut).map(|(_, v)| v.norm()).fold(0.0, f64::max);
    if tail > TAIL_TOLERANCE * peak {
        return Err(ConeError::ProfileNotResolved(format!(
            "profile not resolved by grid: |f| reaches {:.3e} of its peak beyond r = {cut}",
            tail / peak
        )));
    }
    Ok(())
}

/// H_ν f sampled on `out`.
pub fn hankel_transform(nu: f64, f: &[Complex64], grid: &RadialGrid, out: &RadialGrid) -> Result<Vec<Complex64>> {
    let mut v = hankel_transform_many(nu, &[f.to_vec()], grid, out)?;
    Ok(v.pop().unwrap())
}

/// H_ν of several profiles on the same grids, sharing the Bessel evaluations.
pub fn hankel_transform_many(nu: f64, fs: &[Vec<Complex64>], grid: &RadialGrid, out: &RadialGrid) -> Result<Vec<Vec<Complex64>>> {
    if !(nu >= 0.0) {
        return Err(ConeError::Domain(format!("Hankel order must be nonnegative, got {nu}")));
    }
    if grid.n != out.n {
        return Err(ConeError::Domain("input and output grids carry different cone dimensions".into()));
    }
    for f in fs {
        if f.len() != grid.len() {
            return Err(ConeError::Domain(format!("profile has {} values for {} nodes", f.len(), grid.len())));
        }
        check_tail(f, grid)?;
    }
    let peak = fs.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..grid.len()).filter(|&j| fs.iter().any(|f| f[j].norm() > 1e-20 * peak)).collect();
    let half = 0.5 * (grid.n as f64 - 2.0);
    let rows: Vec<Vec<Complex64>> = out
        .nodes
        .par_iter()
        .map(|&rho| {
            let mut acc = vec![Complex64::new(0.0, 0.0); fs.len()];
            for &j in &active {
                let x = grid.nodes[j] * rho;
                let k = x.powf(-half) * j_value(nu, x) * grid.weights[j];
                for (a, f) in acc.iter_mut().zip(fs) {
                    *a += f[j] * k;
                }
            }
            acc
        })
        .collect();
    Ok((0..fs.len()).map(|m| rows.iter().map(|row| row[m]).collect()).collect())
}

/// Σ w_i |f_i|², the squared L²(r^{n−1}dr) norm.
pub fn radial_norm_sq(f: &[Complex64], grid: &RadialGrid) -> f64 {
    f.iter().zip(&grid.weights).map(|(v, w)| w * v.norm_sqr()).sum()
}

/// r^{ν−(n−2)/2} e^{−βr²/2}, whose order-ν transform is again of this form.
pub fn adapted_gaussian(nu: f64, beta: f64, grid: &RadialGrid) -> Vec<Complex64> {
    let p = nu - 0.5 * (grid.n as f64 - 2.0);
    grid.nodes.iter().map(|r| Complex64::new(r.powf(p) * (-0.5 * beta * r * r).exp(), 0.0)).collect()
}

/// Closed form of H_ν[ρ^{ν−(n−2)/2} e^{−ρ²(β/2 + it)}](r)
/// = r^{ν−(n−2)/2} (β+2it)^{−ν−1} e^{−r²/(2(β+2it))}.
pub fn adapted_gaussian_propagated(nu: f64, beta: f64, t: f64, n: usize, r: f64) -> Complex64 {
    let p = nu - 0.5 * (n as f64 - 2.0);
    let b = Complex64::new(beta, 2.0 * t);
    r.powf(p) * b.powf(-nu - 1.0) * (-r * r / (2.0 * b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = RadialGrid::graded(3, 320, 10.0).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); g.len()];
        assert!(hankel_transform(1.0, &z, &g, &g).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn matches_closed_form() {
        let g = RadialGrid::graded(3, 1024, 20.0).unwrap();
        for (nu, beta) in [(0.5, 1.0), (1.3, 2.0), (4.0, 1.5)] {
            let f = adapted_gaussian(nu, beta, &g);
            let h = hankel_transform(nu, &f, &g, &g).unwrap();
            let want: Vec<Complex64> = g.nodes.iter().map(|&r| adapted_gaussian_propagated(nu, beta, 0.0, 3, r)).collect();
            assert!(max_dev(&h, &want) < 1e-10, "nu {nu}: {}", max_dev(&h, &want));
        }
    }

    #[test]
    fn rejects_unresolved_profile() {
        let g = RadialGrid::graded(3, 320, 10.0).unwrap();
        let f: Vec<Complex64> = g.nodes.iter().map(|r| Complex64::new((-0.1 * r).exp(), 0.0)).collect();
        assert!(matches!(hankel_transform(1.0, &f, &g, &g), Err(ConeError::ProfileNotResolved(_))));
    }

    #[test]
    fn unitary_and_self_inverse_in_four_dimensions() {
        let g = RadialGrid::graded(4, 2048, 30.0).unwrap();
        let f = adapted_gaussian(2.3, 1.0, &g);
        let h = hankel_transform(2.3, &f, &g, &g).unwrap();
        let back = hankel_transform(2.3, &h, &g, &g).unwrap();
        assert!((radial_norm_sq(&h, &g) / radial_norm_sq(&f, &g) - 1.0).abs() < 1e-9);
        assert!(max_dev(&back, &f) < 1e-9);
    }
}
