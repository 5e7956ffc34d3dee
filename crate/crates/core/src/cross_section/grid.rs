//! Quadrature grids on Y carrying the Riemannian measure dh(y).

use std::f64::consts::PI;

use super::{CrossSectionKind, CrossSectionSpec, YPoint};
use crate::error::{ConeError, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone)]
pub struct YGrid {
    pub points: Vec<YPoint>,
    pub weights: Vec<f64>,
}

impl YGrid {
    /// Periodic trapezoid rule with `per_dim` nodes in each angle.
    pub fn torus(radii: &[f64], per_dim: usize) -> Self {
        let d = radii.len();
        let total = per_dim.pow(d as u32);
        let w: f64 = radii.iter().map(|r| 2.0 * PI * r / per_dim as f64).product();
        let mut points = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                coords.push(2.0 * PI * (rest % per_dim) as f64 / per_dim as f64);
                rest /= per_dim;
            }
            points.push(YPoint { coords });
        }
        YGrid { points, weights: vec![w; total] }
    }

    /// Gauss–Legendre in cos θ times a periodic trapezoid in φ on S²_σ.
    pub fn sphere2(radius: f64, n_theta: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let theta = x.acos();
            for k in 0..n_phi {
                let phi = 2.0 * PI * k as f64 / n_phi as f64;
                points.push(YPoint::sphere_angles(theta, phi));
                weights.push(w * 2.0 * PI / n_phi as f64 * radius * radius);
            }
        }
        YGrid { points, weights }
    }

    /// A standard grid for the cross-section, exact for eigenfunctions up to roughly
    /// `resolution` oscillations per unit angle.
    pub fn for_spec(spec: &CrossSectionSpec, resolution: usize) -> Result<Self> {
        match &spec.kind {
            CrossSectionKind::Circle { radius } => Ok(YGrid::torus(&[*radius], resolution)),
            CrossSectionKind::Torus { radii } => Ok(YGrid::torus(radii, resolution)),
            CrossSectionKind::Sphere { dim: 2, radius } => Ok(YGrid::sphere2(*radius, resolution, 2 * resolution + 1)),
            CrossSectionKind::Sphere { dim, .. } => {
                Err(ConeError::GeometryUnavailable(format!("no quadrature grid on S^{dim}; only S² is supported")))
            }
            CrossSectionKind::Custom(_) => Err(ConeError::GeometryUnavailable("custom spectra carry no grid".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
