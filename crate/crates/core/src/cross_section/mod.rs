//! Closed cross-sections (Y, h): spectra, eigenfunctions, geodesic geometry and
//! the hypothesis gate of the cone theorems.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{ConeError, Result};

pub mod custom;
pub mod eigen;
pub mod geometry;
pub mod grid;
pub mod spectrum;

pub use custom::{CustomRow, CustomSpectrum, EigenfunctionEvaluator, EvaluatorRegistry};
pub use geometry::{distance_spectrum, geodesic_distance, sample_pairs, DistanceEntry, YPoint};
pub use grid::YGrid;
pub use spectrum::{build_spectrum, take_counted, weyl_slope, ModeBasis, SpectralMode};

#[derive(Debug, Clone)]
pub enum CrossSectionKind {
    Circle { radius: f64 },
    Torus { radii: Vec<f64> },
    Sphere { dim: usize, radius: f64 },
    Custom(Arc<CustomSpectrum>),
}

#[derive(Debug, Clone)]
pub struct CrossSectionSpec {
    pub kind: CrossSectionKind,
    pub dim: usize,
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(ConeError::Domain(format!("radii must be positive and finite, got {r}")))
    }
}

impl CrossSectionSpec {
    pub fn circle(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(CrossSectionSpec { kind: CrossSectionKind::Circle { radius }, dim: 1 })
    }

    pub fn torus(radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(ConeError::Domain("torus needs at least one radius".into()));
        }
        for &r in radii {
            check_radius(r)?;
        }
        Ok(CrossSectionSpec { kind: CrossSectionKind::Torus { radii: radii.to_vec() }, dim: radii.len() })
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        if dim < 1 {
            return Err(ConeError::Domain("sphere dimension must be at least 1".into()));
        }
        Ok(CrossSectionSpec { kind: CrossSectionKind::Sphere { dim, radius }, dim })
    }

    pub fn custom(spectrum: CustomSpectrum) -> Self {
        let dim = spectrum.dim;
        CrossSectionSpec { kind: CrossSectionKind::Custom(Arc::new(spectrum)), dim }
    }

    /// Riemannian volume of Y.
    pub fn volume(&self) -> f64 {
        match &self.kind {
            CrossSectionKind::Circle { radius } => 2.0 * PI * radius,
            CrossSectionKind::Torus { radii } => radii.iter().map(|r| 2.0 * PI * r).product(),
            CrossSectionKind::Sphere { dim, radius } => sphere_volume(*dim, *radius),
            CrossSectionKind::Custom(c) => c.volume,
        }
    }

    /// Smallest eigenvalue of Δ_h (before adding the potential).
    pub fn min_laplace_eigenvalue(&self) -> f64 {
        match &self.kind {
            CrossSectionKind::Custom(c) => c.rows.iter().map(|r| r.mu).fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }
}

/// Volume of the round sphere S^d of radius σ.
pub fn sphere_volume(dim: usize, radius: f64) -> f64 {
    let d = dim as f64;
    2.0 * PI.powf(0.5 * (d + 1.0)) / crate::specfun::gamma::gamma_unchecked(0.5 * (d + 1.0)) * radius.powf(d)
}

/// The cone over Y with constant potential V₀ ≡ a.
#[derive(Debug, Clone)]
pub struct ConeModel {
    pub n: usize,
    pub spec: CrossSectionSpec,
    pub a: f64,
    /// √(min spectrum of P); NaN when P is not strictly positive.
    pub nu0: f64,
    pub alpha: f64,
    pub q_alpha: f64,
}

impl ConeModel {
    /// Builds the model. A non-positive P is not an error here so that the
    /// hypothesis gate can report it; spectrum construction refuses it.
    pub fn new(n: usize, spec: CrossSectionSpec, a: f64) -> Result<Self> {
        if n < 3 {
            return Err(ConeError::Domain(format!("cone dimension must be at least 3, got {n}")));
        }
        if spec.dim != n - 1 {
            return Err(ConeError::Domain(format!("cross-section dimension {} does not match n - 1 = {}", spec.dim, n - 1)));
        }
        if !a.is_finite() {
            return Err(ConeError::Domain(format!("potential must be finite, got {a}")));
        }
        let shift = 0.25 * ((n - 2) * (n - 2)) as f64;
        let p_min = spec.min_laplace_eigenvalue() + a + shift;
        let nu0 = if p_min > 0.0 { p_min.sqrt() } else { f64::NAN };
        let alpha = -0.5 * (n as f64 - 2.0) + nu0;
        let q_alpha = if alpha >= 0.0 { f64::INFINITY } else { -(n as f64) / alpha };
        Ok(ConeModel { n, spec, a, nu0, alpha, q_alpha })
    }

    /// (n−2)²/4.
    pub fn shift(&self) -> f64 {
        0.25 * ((self.n - 2) * (self.n - 2)) as f64
    }

    /// Lowest eigenvalue of P = Δ_h + a + (n−2)²/4.
    pub fn p_min(&self) -> f64 {
        self.spec.min_laplace_eigenvalue() + self.a + self.shift()
    }

    /// Dual exponent q′(α).
    pub fn q_alpha_dual(&self) -> f64 {
        if self.q_alpha.is_infinite() {
            1.0
        } else {
            self.q_alpha / (self.q_alpha - 1.0)
        }
    }
}

/// Conjugate radius of Y: +∞ for flat cross-sections, πσ for the round sphere.
pub fn conjugate_radius(spec: &CrossSectionSpec) -> Result<f64> {
    match &spec.kind {
        CrossSectionKind::Circle { .. } | CrossSectionKind::Torus { .. } => Ok(f64::INFINITY),
        CrossSectionKind::Sphere { dim, radius } => {
            if *dim == 1 {
                Ok(f64::INFINITY)
            } else {
                Ok(PI * radius)
            }
        }
        CrossSectionKind::Custom(_) => Err(ConeError::GeometryUnavailable("custom spectra carry no metric".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HypothesisReport {
    pub rconj_ok: bool,
    pub p_positive: bool,
    /// None when the geometry is unavailable.
    pub rconj: Option<f64>,
    pub p_min: f64,
}

pub fn check_hypothesis(model: &ConeModel) -> HypothesisReport {
    let rconj = conjugate_radius(&model.spec).ok();
    let p_min = model.p_min();
    HypothesisReport { rconj_ok: rconj.is_some_and(|r| r > PI), p_positive: p_min > 0.0, rconj, p_min }
}
