//! Explicit spectra of P = Δ_h + a + (n−2)²/4 and their eigenfunctions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::eigen::{harmonic_multiplicity, spherical_harmonic, zonal_polynomials};
use super::geometry::{sphere_cos, YPoint};
use super::{ConeModel, CrossSectionKind, CrossSectionSpec, EigenfunctionEvaluator};
use crate::error::{ConeError, Result};
use crate::stats::linear_fit;

/// Eigenfunctions spanning one eigenspace.
#[derive(Clone)]
pub enum ModeBasis {
    /// Plane waves e^{i m·θ}/√vol on a flat torus (a circle when d = 1);
    /// lattice vectors stored flat with stride d.
    Fourier { radii: Arc<Vec<f64>>, vectors: Vec<i32> },
    /// Degree-ℓ harmonics on the round sphere S^d of the given radius.
    Spherical { dim: usize, radius: f64, degree: usize },
    /// A registered evaluator from a custom table.
    Custom { id: String, evaluator: Arc<dyn EigenfunctionEvaluator> },
}

impl fmt::Debug for ModeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeBasis::Fourier { radii, vectors } => {
                write!(f, "Fourier {{ dim: {}, vectors: {} }}", radii.len(), vectors.len() / radii.len())
            }
            ModeBasis::Spherical { dim, radius, degree } => {
                write!(f, "Spherical {{ dim: {dim}, radius: {radius}, degree: {degree} }}")
            }
            ModeBasis::Custom { id, .. } => write!(f, "Custom {{ id: {id:?} }}"),
        }
    }
}

/// One eigenvalue μ of Δ_h + a with its eigenspace; ν = √(μ + (n−2)²/4).
#[derive(Debug, Clone)]
pub struct SpectralMode {
    pub index: usize,
    pub mu: f64,
    pub nu: f64,
    pub multiplicity: usize,
    pub basis: ModeBasis,
    volume: f64,
}

impl SpectralMode {
    /// φ_label(y) for label < multiplicity.
    pub fn eval(&self, y: &YPoint, label: usize) -> Result<Complex64> {
        if label >= self.multiplicity {
            return Err(ConeError::Domain(format!("label {label} out of range for multiplicity {}", self.multiplicity)));
        }
        match &self.basis {
            ModeBasis::Fourier { radii, vectors } => {
                let d = radii.len();
                let m = &vectors[label * d..(label + 1) * d];
                let phase: f64 = m.iter().zip(&y.coords).map(|(m, t)| *m as f64 * t).sum();
                Ok(Complex64::from_polar(self.volume.sqrt().recip(), phase))
            }
            ModeBasis::Spherical { dim, radius, degree } => {
                if *dim != 2 {
                    return Err(ConeError::GeometryUnavailable(
                        "individual harmonics are provided on S² only; use projectors on S^d".into(),
                    ));
                }
                let (theta, phi) = y.polar_azimuth();
                let m = label as i64 - *degree as i64;
                Ok(spherical_harmonic(*degree, m, theta, phi) / *radius)
            }
            ModeBasis::Custom { evaluator, .. } => Ok(evaluator.eval(y, label)),
        }
    }

    /// Σ_label φ(y₁) conj φ(y₂), the kernel of the orthogonal projection.
    pub fn projector(&self, y1: &YPoint, y2: &YPoint) -> Complex64 {
        match &self.basis {
            ModeBasis::Fourier { radii, vectors } => {
                let d = radii.len();
                let delta: Vec<f64> = y1.coords.iter().zip(&y2.coords).map(|(a, b)| a - b).collect();
                // lattice shells are symmetric under m → −m, so the sum is real
                let s: f64 = vectors.chunks_exact(d).map(|m| m.iter().zip(&delta).map(|(m, t)| *m as f64 * t).sum::<f64>().cos()).sum();
                Complex64::new(s / self.volume, 0.0)
            }
            ModeBasis::Spherical { dim, degree, .. } => {
                let r = zonal_polynomials(*dim, *degree, sphere_cos(y1, y2))[*degree];
                Complex64::new(self.multiplicity as f64 / self.volume * r, 0.0)
            }
            ModeBasis::Custom { evaluator, .. } => {
                (0..self.multiplicity).map(|l| evaluator.eval(y1, l) * evaluator.eval(y2, l).conj()).sum()
            }
        }
    }

    /// sup_y Σ_label |φ_label(y)|².
    pub fn sup_sum(&self) -> f64 {
        match &self.basis {
            ModeBasis::Custom { evaluator, .. } => self.multiplicity as f64 * evaluator.sup_norm().powi(2),
            _ => self.multiplicity as f64 / self.volume,
        }
    }
}

/// Projector values for every mode at one (y₁, y₂) pair; sphere levels share
/// a single zonal recurrence.
pub fn projectors(modes: &[SpectralMode], y1: &YPoint, y2: &YPoint) -> Vec<Complex64> {
    let sphere_max = modes
        .iter()
        .filter_map(|m| match &m.basis {
            ModeBasis::Spherical { dim, degree, .. } => Some((*dim, *degree)),
            _ => None,
        })
        .max_by_key(|p| p.1);
    let zonal = sphere_max.map(|(dim, lmax)| zonal_polynomials(dim, lmax, sphere_cos(y1, y2)));
    modes
        .iter()
        .map(|m| match (&m.basis, &zonal) {
            (ModeBasis::Spherical { degree, .. }, Some(z)) => Complex64::new(m.multiplicity as f64 / m.volume * z[*degree], 0.0),
            _ => m.projector(y1, y2),
        })
        .collect()
}

/// All modes with ν ≤ nu_max, ascending in ν, multiplicities aggregated.
pub fn build_spectrum(model: &ConeModel, nu_max: f64) -> Result<Vec<SpectralMode>> {
    if !(model.p_min() > 0.0) {
        return Err(ConeError::HypothesisViolated(format!("P not positive (lowest eigenvalue {})", model.p_min())));
    }
    if !(nu_max >= model.nu0) {
        return Err(ConeError::Domain(format!("nu_max = {nu_max} is below nu0 = {}", model.nu0)));
    }
    spectrum_of(&model.spec, model.a, model.shift(), nu_max)
}

/// Modes with μ = μ_Δ + a and ν = √(μ + shift) ≤ nu_max.
pub(crate) fn spectrum_of(spec: &CrossSectionSpec, a: f64, shift: f64, nu_max: f64) -> Result<Vec<SpectralMode>> {
    let offset = a + shift;
    let lap_max = nu_max * nu_max - offset;
    let volume = spec.volume();
    let mut modes = Vec::new();
    let nu_of = |lap: f64| (lap + offset).sqrt();
    match &spec.kind {
        CrossSectionKind::Circle { radius } => fourier_levels(&[*radius], lap_max, a, shift, volume, &mut modes),
        CrossSectionKind::Torus { radii } => fourier_levels(radii, lap_max, a, shift, volume, &mut modes),
        CrossSectionKind::Sphere { dim, radius } => {
            let mut l = 0usize;
            loop {
                let lap = (l * (l + dim - 1)) as f64 / (radius * radius);
                if lap > lap_max * (1.0 + 1e-14) {
                    break;
                }
                modes.push(SpectralMode {
                    index: 0,
                    mu: lap + a,
                    nu: nu_of(lap),
                    multiplicity: harmonic_multiplicity(*dim, l),
                    basis: ModeBasis::Spherical { dim: *dim, radius: *radius, degree: l },
                    volume,
                });
                l += 1;
            }
        }
        CrossSectionKind::Custom(c) => {
            let mut rows: Vec<usize> = (0..c.rows.len()).collect();
            rows.sort_by(|&i, &j| {
                c.rows[i].mu.partial_cmp(&c.rows[j].mu).unwrap().then_with(|| c.rows[i].eigenfunction_id.cmp(&c.rows[j].eigenfunction_id))
            });
            for i in rows {
                let row = &c.rows[i];
                if row.mu <= lap_max * (1.0 + 1e-14) {
                    modes.push(SpectralMode {
                        index: 0,
                        mu: row.mu + a,
                        nu: nu_of(row.mu),
                        multiplicity: row.multiplicity,
                        basis: ModeBasis::Custom { id: row.eigenfunction_id.clone(), evaluator: c.evaluators[i].clone() },
                        volume,
                    });
                }
            }
        }
    }
    for (i, m) in modes.iter_mut().enumerate() {
        m.index = i;
    }
    Ok(modes)
}

fn fourier_levels(radii: &[f64], lap_max: f64, a: f64, shift: f64, volume: f64, out: &mut Vec<SpectralMode>) {
    if lap_max < 0.0 {
        return;
    }
    let d = radii.len();
    let mut points: Vec<(f64, Vec<i32>)> = Vec::new();
    let mut current = vec![0i32; d];
    fn recurse(i: usize, acc: f64, radii: &[f64], lap_max: f64, current: &mut Vec<i32>, out: &mut Vec<(f64, Vec<i32>)>) {
        if i == radii.len() {
            out.push((acc, current.clone()));
            return;
        }
        let bound = (radii[i] * (lap_max - acc).max(0.0).sqrt()).floor() as i32;
        for m in -bound..=bound {
            let next = acc + (m as f64 / radii[i]).powi(2);
            if next <= lap_max * (1.0 + 1e-14) {
                current[i] = m;
                recurse(i + 1, next, radii, lap_max, current, out);
            }
        }
    }
    recurse(0, 0.0, radii, lap_max, &mut current, &mut points);
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    let radii = Arc::new(radii.to_vec());
    let mut i = 0;
    while i < points.len() {
        let lap = points[i].0;
        let mut j = i;
        let mut vectors = Vec::new();
        while j < points.len() && (points[j].0 - lap).abs() <= 1e-12 * lap.max(1.0) {
            vectors.extend_from_slice(&points[j].1);
            j += 1;
        }
        out.push(SpectralMode {
            index: 0,
            mu: lap + a,
            nu: (lap + a + shift).sqrt(),
            multiplicity: j - i,
            basis: ModeBasis::Fourier { radii: radii.clone(), vectors },
            volume,
        });
        i = j;
    }
}

/// ν_k counted with multiplicity, ascending.
pub fn counted_nus(modes: &[SpectralMode]) -> Vec<f64> {
    modes.iter().flat_map(|m| std::iter::repeat_n(m.nu, m.multiplicity)).collect()
}

/// The first `count` eigenvalues counted with multiplicity; the last mode's
/// multiplicity is cut down if needed. Intended for counting statistics.
pub fn take_counted(modes: &[SpectralMode], count: usize) -> Vec<SpectralMode> {
    let mut out = Vec::new();
    let mut left = count;
    for m in modes {
        if left == 0 {
            break;
        }
        let mut m = m.clone();
        if m.multiplicity > left {
            m.multiplicity = left;
            if let ModeBasis::Fourier { radii, vectors } = &mut m.basis {
                vectors.truncate(left * radii.len());
            }
        }
        left -= m.multiplicity;
        out.push(m);
    }
    out
}

/// Slope of log ν_k² against log(1+k) over the upper half of the counted list.
pub fn weyl_slope(modes: &[SpectralMode]) -> Result<f64> {
    let nus = counted_nus(modes);
    if nus.len() < 50 {
        return Err(ConeError::InsufficientData(format!("{} modes counted, need at least 50", nus.len())));
    }
    let start = nus.len() / 2;
    let xs: Vec<f64> = (start..nus.len()).map(|k| (1.0 + k as f64).ln()).collect();
    let ys: Vec<f64> = nus[start..].iter().map(|nu| (nu * nu).ln()).collect();
    linear_fit(&xs, &ys).map(|f| f.0).ok_or_else(|| ConeError::InsufficientData("eigenvalue list does not spread".into()))
}
