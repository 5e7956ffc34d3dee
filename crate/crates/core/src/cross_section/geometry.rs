//! Points on Y, geodesic distance and the distance spectrum.

use std::f64::consts::PI;

use serde::Serialize;

use super::{CrossSectionKind, CrossSectionSpec};
use crate::error::{ConeError, Result};

/// A point on the cross-section.
///
/// Circle and torus points are angle vectors (θ₁, …, θ_d); sphere points are
/// unit vectors in ℝ^{d+1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YPoint {
    pub coords: Vec<f64>,
}

impl YPoint {
    pub fn angles(theta: &[f64]) -> Self {
        YPoint { coords: theta.to_vec() }
    }

    /// Point on S² from polar angle θ and azimuth φ.
    pub fn sphere_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        YPoint { coords: vec![st * cp, st * sp, ct] }
    }

    /// Normalised copy of an ambient vector.
    pub fn unit(v: &[f64]) -> Self {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        YPoint { coords: v.iter().map(|x| x / norm).collect() }
    }

    /// Polar and azimuthal angles of a point on S².
    pub fn polar_azimuth(&self) -> (f64, f64) {
        let z = self.coords[2].clamp(-1.0, 1.0);
        (z.acos(), self.coords[1].atan2(self.coords[0]))
    }
}

/// Wraps an angle difference into (−π, π].
pub(crate) fn wrap_angle(d: f64) -> f64 {
    let mut w = d.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Cosine of the angle between two sphere points.
pub(crate) fn sphere_cos(y1: &YPoint, y2: &YPoint) -> f64 {
    y1.coords.iter().zip(&y2.coords).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0)
}

fn check_point(spec: &CrossSectionSpec, y: &YPoint) -> Result<()> {
    let want = match &spec.kind {
        CrossSectionKind::Sphere { dim, .. } => dim + 1,
        CrossSectionKind::Custom(_) => return Ok(()),
        _ => spec.dim,
    };
    if y.coords.len() != want {
        return Err(ConeError::Domain(format!("point has {} coordinates, expected {want}", y.coords.len())));
    }
    Ok(())
}

/// Geodesic distance d_h(y₁, y₂).
pub fn geodesic_distance(spec: &CrossSectionSpec, y1: &YPoint, y2: &YPoint) -> Result<f64> {
    check_point(spec, y1)?;
    check_point(spec, y2)?;
    match &spec.kind {
        CrossSectionKind::Circle { radius } => Ok(radius * wrap_angle(y1.coords[0] - y2.coords[0]).abs()),
        CrossSectionKind::Torus { radii } => {
            Ok(radii.iter().zip(y1.coords.iter().zip(&y2.coords)).map(|(r, (a, b))| (r * wrap_angle(a - b)).powi(2)).sum::<f64>().sqrt())
        }
        CrossSectionKind::Sphere { radius, .. } => Ok(radius * sphere_cos(y1, y2).acos()),
        CrossSectionKind::Custom(_) => Err(ConeError::GeometryUnavailable("custom spectra carry no metric".into())),
    }
}

/// One geodesic length with its loop multiplicity.
///
/// `degenerate` marks lengths realised by a continuum of geodesics (on round
/// spheres: positive multiples of πσ); such entries are excluded from
/// kernel-level use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceEntry {
    pub distance: f64,
    pub multiplicity: usize,
    pub degenerate: bool,
}

/// All geodesic lengths from y₂ to y₁ below `cutoff`, sorted, with multiplicity.
pub fn distance_spectrum(spec: &CrossSectionSpec, y1: &YPoint, y2: &YPoint, cutoff: f64) -> Result<Vec<DistanceEntry>> {
    if !(cutoff > 0.0 && cutoff <= PI + 1.0) {
        return Err(ConeError::Domain(format!("cutoff must lie in (0, pi + 1], got {cutoff}")));
    }
    check_point(spec, y1)?;
    check_point(spec, y2)?;
    let mut lengths: Vec<(f64, bool)> = Vec::new();
    match &spec.kind {
        CrossSectionKind::Circle { radius } => {
            let delta = radius * wrap_angle(y1.coords[0] - y2.coords[0]);
            lattice_lengths(&[delta], &[2.0 * PI * radius], cutoff, &mut lengths);
        }
        CrossSectionKind::Torus { radii } => {
            let delta: Vec<f64> = radii.iter().zip(y1.coords.iter().zip(&y2.coords)).map(|(r, (a, b))| r * wrap_angle(a - b)).collect();
            let periods: Vec<f64> = radii.iter().map(|r| 2.0 * PI * r).collect();
            lattice_lengths(&delta, &periods, cutoff, &mut lengths);
        }
        CrossSectionKind::Sphere { dim, radius } => {
            let d = radius * sphere_cos(y1, y2).acos();
            let period = 2.0 * PI * radius;
            if *dim == 1 {
                lattice_lengths(&[d], &[period], cutoff, &mut lengths);
            } else {
                let mut m = 0.0;
                while d + m * period < cutoff || period - d + m * period < cutoff {
                    for len in [d + m * period, period - d + m * period] {
                        if len < cutoff {
                            let k = len / (PI * radius);
                            let degenerate = len > 0.0 && (k - k.round()).abs() < 1e-12 * k.max(1.0);
                            lengths.push((len, degenerate));
                        }
                    }
                    m += 1.0;
                }
            }
        }
        CrossSectionKind::Custom(_) => {
            return Err(ConeError::GeometryUnavailable("custom spectra carry no metric".into()));
        }
    }
    lengths.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<DistanceEntry> = Vec::new();
    for (len, degenerate) in lengths {
        match out.last_mut() {
            Some(last) if (len - last.distance).abs() <= 1e-12 * len.max(1.0) => {
                last.multiplicity += 1;
                last.degenerate |= degenerate;
            }
            _ => out.push(DistanceEntry { distance: len, multiplicity: 1, degenerate }),
        }
    }
    Ok(out)
}

/// Eight fixed point pairs on Y for scans: coincident points, a spread of
/// separations, and two near-antipodal pairs.
pub fn sample_pairs(spec: &CrossSectionSpec) -> Vec<(YPoint, YPoint)> {
    let seps = [0.0, 0.4, 0.9, 1.5, 2.1, 2.6, PI - 0.1, PI - 0.02];
    match &spec.kind {
        CrossSectionKind::Sphere { dim: 2, .. } => {
            let base = YPoint::sphere_angles(0.3, 0.2);
            seps.iter()
                .map(|&g| {
                    // rotate away from the base point along a fixed great circle
                    let (st, ct) = (0.3f64 + g).sin_cos();
                    (base.clone(), YPoint::unit(&[st * 0.2f64.cos(), st * 0.2f64.sin(), ct]))
                })
                .collect()
        }
        CrossSectionKind::Sphere { dim, .. } => {
            let mut e = vec![0.0; dim + 1];
            e[0] = 1.0;
            let base = YPoint { coords: e };
            seps.iter()
                .map(|&g| {
                    let mut v = vec![0.0; dim + 1];
                    v[0] = g.cos();
                    v[1] = g.sin();
                    (base.clone(), YPoint { coords: v })
                })
                .collect()
        }
        _ => {
            let d = spec.dim;
            let base: Vec<f64> = (0..d).map(|i| 0.25 + 0.5 * i as f64).collect();
            seps.iter()
                .map(|&g| {
                    // separation g in every angle, so the last pairs sit near the farthest point
                    let other: Vec<f64> = base.iter().map(|b| b + g).collect();
                    (YPoint::angles(&base), YPoint::angles(&other))
                })
                .collect()
        }
    }
}

/// Lengths |δ + Σ mᵢ Lᵢ eᵢ| < cutoff over integer translates m.
fn lattice_lengths(delta: &[f64], periods: &[f64], cutoff: f64, out: &mut Vec<(f64, bool)>) {
    fn recurse(i: usize, acc: f64, delta: &[f64], periods: &[f64], cutoff: f64, out: &mut Vec<(f64, bool)>) {
        if i == delta.len() {
            let len = acc.sqrt();
            if len < cutoff {
                out.push((len, false));
            }
            return;
        }
        let lo = ((-cutoff - delta[i]) / periods[i]).floor() as i64;
        let hi = ((cutoff - delta[i]) / periods[i]).ceil() as i64;
        for m in lo..=hi {
            let c = delta[i] + m as f64 * periods[i];
            let next = acc + c * c;
            if next < cutoff * cutoff {
                recurse(i + 1, next, delta, periods, cutoff, out);
            }
        }
    }
    recurse(0, 0.0, delta, periods, cutoff, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(v: &[DistanceEntry]) -> Vec<(f64, usize)> {
        v.iter().map(|e| (e.distance, e.multiplicity)).collect()
    }

    #[test]
    fn circle_examples() {
        let spec = CrossSectionSpec::circle(2.0).unwrap();
        // arc separation 1 on radius 2 is an angle of 0.5
        let d = distance_spectrum(&spec, &YPoint::angles(&[0.5]), &YPoint::angles(&[0.0]), PI + 0.1).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].distance - 1.0).abs() < 1e-14 && d[0].multiplicity == 1);

        let spec = CrossSectionSpec::circle(0.5).unwrap();
        let d = distance_spectrum(&spec, &YPoint::angles(&[2.0]), &YPoint::angles(&[0.0]), PI + 0.1).unwrap();
        let e = entries(&d);
        assert_eq!(e.len(), 2);
        assert!((e[0].0 - 1.0).abs() < 1e-14);
        assert!((e[1].0 - (PI - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn coincident_points_on_torus() {
        let spec = CrossSectionSpec::torus(&[1.0, 1.0]).unwrap();
        let y = YPoint::angles(&[0.3, 1.1]);
        let d = distance_spectrum(&spec, &y, &y, PI + 1.0).unwrap();
        assert_eq!(entries(&d), vec![(0.0, 1)]);
        // small torus: shortest loops have length 2π·0.5 = π, four of them
        let spec = CrossSectionSpec::torus(&[0.5, 0.5]).unwrap();
        let d = distance_spectrum(&spec, &y, &y, PI + 0.1).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].multiplicity, 4);
    }

    #[test]
    fn symmetric_and_contains_distance() {
        let spec = CrossSectionSpec::torus(&[0.7, 1.2]).unwrap();
        let a = YPoint::angles(&[0.1, 2.0]);
        let b = YPoint::angles(&[2.5, -0.4]);
        let ab = distance_spectrum(&spec, &a, &b, PI + 1.0).unwrap();
        let ba = distance_spectrum(&spec, &b, &a, PI + 1.0).unwrap();
        assert_eq!(entries(&ab), entries(&ba));
        let dh = geodesic_distance(&spec, &a, &b).unwrap();
        assert!(ab.iter().any(|e| (e.distance - dh).abs() < 1e-12));
        assert!((ab[0].distance - dh).abs() < 1e-12);
    }

    #[test]
    fn sphere_degenerate_pairs() {
        let spec = CrossSectionSpec::sphere(2, 1.2).unwrap();
        let n = YPoint::sphere_angles(0.0, 0.0);
        let s = YPoint::sphere_angles(PI, 0.0);
        let d = distance_spectrum(&spec, &n, &s, PI + 0.1).unwrap();
        assert_eq!(d.len(), 0, "antipodal distance 1.2π exceeds the cutoff");
        let d = distance_spectrum(&spec, &n, &s, PI + 1.0).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].degenerate && d[0].multiplicity == 2);
        let spec = CrossSectionSpec::sphere(2, 1.0).unwrap();
        let d = distance_spectrum(&spec, &n, &s, PI + 0.1).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].degenerate);
        let y = YPoint::sphere_angles(0.7, 0.4);
        let z = YPoint::sphere_angles(1.3, 2.0);
        let d = distance_spectrum(&spec, &y, &z, PI + 0.1).unwrap();
        assert!(d.iter().all(|e| !e.degenerate));
        assert!((d[0].distance - geodesic_distance(&spec, &y, &z).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_custom_and_bad_cutoff() {
        let spec = CrossSectionSpec::custom(super::super::CustomSpectrum::constant_only(2, 1.0));
        let y = YPoint::angles(&[0.0, 0.0]);
        assert!(matches!(distance_spectrum(&spec, &y, &y, 1.0), Err(ConeError::GeometryUnavailable(_))));
        let spec = CrossSectionSpec::torus(&[1.0, 1.0]).unwrap();
        assert!(distance_spectrum(&spec, &y, &y, PI + 2.0).is_err());
    }
}
