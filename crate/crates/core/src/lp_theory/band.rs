//! Band-limited functions on the cone: finite sums of dyadic spectral atoms
//! on finitely many eigenfunctions of Y, and their Littlewood–Paley pieces.
//!
//! A function is given on the spectral side as
//! ĉ_k(ρ) = Σ_{j′} a_{k,j′} A(2^{−j′}ρ) with A supported in [1/2, 2]. Since
//! H_ν[g(2^{−j}·)](r) = 2^{jn} H_ν[g](2^j r), every piece φ_j f is a
//! combination of the few profiles H_ν[φ·A(2^{−d}·)], d ∈ {−1, 0, 1},
//! evaluated at 2^j r. On a grid with breaks 2^{k/m}, scaling by 2^j is an
//! index shift, so the profiles are tabulated once.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cutoff::{bump, DyadicCutoff};
use crate::cross_section::{build_spectrum, ConeModel, SpectralMode, YGrid};
use crate::error::{ConeError, Result};
use crate::quadrature::GaussLegendre;
use crate::specfun::j_value;
use crate::spectral_calculus::{gridded_lq_norm, ConeGrid, ModeCoefficients, ModeComponent, RadialGrid};

/// Beyond this argument the tabulated profiles are below 1e−10 of their peak
/// and are taken as zero.
pub const PROFILE_REACH: f64 = 256.0;

const PANEL_ORDER: usize = 16;

/// Spectral shape of a single atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Atom {
    /// The cutoff φ itself.
    Cutoff,
    /// exp(−1/(1 − x²)) with x = log₂ρ / width.
    Bump { width: f64 },
}

impl Atom {
    fn value(&self, cutoff: &DyadicCutoff, rho: f64) -> f64 {
        match self {
            Atom::Cutoff => cutoff.value(rho),
            Atom::Bump { width } => {
                if rho > 0.0 {
                    bump(rho.log2() / width)
                } else {
                    0.0
                }
            }
        }
    }
}

/// One eigenfunction of Y with its atom coefficients (j′, a_{j′}).
#[derive(Debug, Clone)]
pub struct BandComponent {
    pub mode: SpectralMode,
    pub label: usize,
    pub bands: Vec<(i32, Complex64)>,
}

impl BandComponent {
    fn coefficient(&self, j: i32) -> Complex64 {
        self.bands.iter().find(|(k, _)| *k == j).map(|(_, a)| *a).unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct BandLimited {
    pub components: Vec<BandComponent>,
}

impl BandLimited {
    /// Seeded data: every eigenfunction with ν ≤ nu_max gets complex atom
    /// coefficients on each band in [j_lo, j_hi].
    pub fn random(model: &ConeModel, nu_max: f64, j_lo: i32, j_hi: i32, seed: u64) -> Result<Self> {
        if j_hi < j_lo {
            return Err(ConeError::Domain(format!("empty band range [{j_lo}, {j_hi}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut components = Vec::new();
        for mode in build_spectrum(model, nu_max)? {
            for label in 0..mode.multiplicity {
                let bands = (j_lo..=j_hi).map(|j| (j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
                components.push(BandComponent { mode: mode.clone(), label, bands });
            }
        }
        Ok(BandLimited { components })
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in &mut out.components {
            for (_, a) in &mut c.bands {
                *a *= s;
            }
        }
        out
    }

    /// Smallest and largest atom scale present.
    pub fn band_range(&self) -> Option<(i32, i32)> {
        let js = self.components.iter().flat_map(|c| c.bands.iter().map(|(j, _)| *j));
        js.fold(None, |acc, j| match acc {
            None => Some((j, j)),
            Some((lo, hi)) => Some((lo.min(j), hi.max(j))),
        })
    }
}

/// Tabulated profiles for one order ν on the argument grid.
#[derive(Debug, Clone)]
struct OrderTables {
    nu: f64,
    /// H_ν[A].
    atom: Vec<f64>,
    /// H_ν[φ·A(2^{−d}·)] for d = −1, 0, 1.
    pieces: [Vec<f64>; 3],
}

/// Littlewood–Paley calculus for band-limited data on a fixed model.
#[derive(Debug, Clone)]
pub struct LpCalculus {
    pub model: ConeModel,
    pub cutoff: DyadicCutoff,
    pub atom: Atom,
    /// Scales j with φ_j f computed; atoms must sit strictly inside.
    pub j_window: (i32, i32),
    pub grid: Arc<RadialGrid>,
    pub y: YGrid,
    per_octave: usize,
    /// Octave of the first break of `grid`, and of the argument grid.
    r_lo: i32,
    s_lo: i32,
    s_len: usize,
    tables: Vec<OrderTables>,
}

impl LpCalculus {
    /// Tables for every order with ν ≤ nu_max, scales in `j_window`, and a
    /// grid on Y with `y_resolution` nodes per angle.
    pub fn new(
        model: &ConeModel,
        cutoff: DyadicCutoff,
        atom: Atom,
        nu_max: f64,
        j_window: (i32, i32),
        y_resolution: usize,
    ) -> Result<Self> {
        let (j0, j1) = j_window;
        if j1 < j0 + 2 {
            return Err(ConeError::Domain(format!("scale window [{j0}, {j1}] is too narrow")));
        }
        let per_octave = 32;
        let reach = PROFILE_REACH.log2().ceil() as i32;
        // below 2^{−8} in the scaled variable the profiles carry no L^p mass worth keeping
        let r_lo = -8 - j1;
        let r_hi = reach - j0;
        let s_lo = r_lo + j0;
        let grid = Arc::new(RadialGrid::self_similar(model.n, r_lo, r_hi, per_octave)?);
        let s_grid = RadialGrid::self_similar(model.n, s_lo, reach, per_octave)?;
        let mut nus: Vec<f64> = build_spectrum(model, nu_max)?.iter().map(|m| m.nu).collect();
        nus.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let tables = nus.iter().map(|&nu| tabulate(model.n, nu, &cutoff, &atom, &s_grid.nodes)).collect();
        Ok(LpCalculus {
            model: model.clone(),
            cutoff,
            atom,
            j_window,
            grid,
            y: YGrid::for_spec(&model.spec, y_resolution)?,
            per_octave,
            r_lo,
            s_lo,
            s_len: s_grid.len(),
            tables,
        })
    }

    fn tables_for(&self, nu: f64) -> Result<&OrderTables> {
        self.tables.iter().find(|t| (t.nu - nu).abs() < 1e-12).ok_or_else(|| ConeError::Domain(format!("order {nu} is not tabulated")))
    }

    /// Index into the argument grid of 2^j·r_i.
    fn shifted(&self, i: usize, j: i32) -> Option<usize> {
        let k = i as i64 + (self.r_lo - self.s_lo + j) as i64 * (self.per_octave * PANEL_ORDER) as i64;
        (0..self.s_len as i64).contains(&k).then_some(k as usize)
    }

    fn check_bands(&self, f: &BandLimited) -> Result<()> {
        if let Some((lo, hi)) = f.band_range() {
            if lo <= self.j_window.0 || hi >= self.j_window.1 {
                return Err(ConeError::Domain(format!(
                    "atoms on scales [{lo}, {hi}] are not inside the window ({}, {}); projections would be lost",
                    self.j_window.0, self.j_window.1
                )));
            }
        }
        Ok(())
    }

    /// Physical-side profiles of f.
    pub fn synthesize(&self, f: &BandLimited) -> Result<ModeCoefficients> {
        self.check_bands(f)?;
        let n = self.model.n as i32;
        let components = f
            .components
            .iter()
            .map(|c| {
                let t = self.tables_for(c.mode.nu)?;
                let profile = (0..self.grid.len())
                    .map(|i| {
                        c.bands.iter().filter_map(|(j, a)| self.shifted(i, *j).map(|k| a * (*j as f64 * n as f64).exp2() * t.atom[k])).sum()
                    })
                    .collect();
                Ok(ModeComponent { mode: c.mode.clone(), label: c.label, profile })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeCoefficients { grid: self.grid.clone(), components })
    }

    /// Physical-side profiles of φ_j(√H)f.
    pub fn project(&self, f: &BandLimited, j: i32) -> Result<ModeCoefficients> {
        self.check_bands(f)?;
        if j < self.j_window.0 || j > self.j_window.1 {
            return Err(ConeError::Domain(format!("scale {j} outside the window {:?}", self.j_window)));
        }
        let scale = (j as f64 * self.model.n as f64).exp2();
        let components = f
            .components
            .iter()
            .map(|c| {
                let t = self.tables_for(c.mode.nu)?;
                let a = [c.coefficient(j - 1), c.coefficient(j), c.coefficient(j + 1)];
                let profile = (0..self.grid.len())
                    .map(|i| match self.shifted(i, j) {
                        Some(k) => scale * (a[0] * t.pieces[0][k] + a[1] * t.pieces[1][k] + a[2] * t.pieces[2][k]),
                        None => Complex64::new(0.0, 0.0),
                    })
                    .collect();
                Ok(ModeComponent { mode: c.mode.clone(), label: c.label, profile })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeCoefficients { grid: self.grid.clone(), components })
    }

    /// Scales j with φ_j f possibly nonzero.
    pub fn active_scales(&self, f: &BandLimited) -> Vec<i32> {
        match f.band_range() {
            Some((lo, hi)) => (lo - 1..=hi + 1).collect(),
            None => Vec::new(),
        }
    }

    fn cone_grid(&self) -> ConeGrid {
        ConeGrid::new((*self.grid).clone(), self.y.clone())
    }

    /// ‖g‖_{L^p(X)} of a profile set on this calculus' grids.
    pub fn lp_norm(&self, g: &ModeCoefficients, p: f64) -> Result<f64> {
        gridded_lq_norm(&g.synthesize(&self.y)?, &self.cone_grid(), p)
    }

    /// Pointwise values of f on the product grid.
    pub fn values(&self, g: &ModeCoefficients) -> Result<Vec<Complex64>> {
        g.synthesize(&self.y)
    }

    /// ‖F‖_{L^p(X)} of gridded values.
    pub fn gridded_norm(&self, values: &[Complex64], p: f64) -> Result<f64> {
        gridded_lq_norm(values, &self.cone_grid(), p)
    }

    /// Σ_k ∫ |m(ρ) ĉ_k(ρ)|² ρ^{n−1} dρ directly on the spectral side.
    pub fn spectral_norm_sq(&self, f: &BandLimited, m: impl Fn(f64) -> f64 + Sync) -> f64 {
        let n = self.model.n as i32;
        f.components
            .par_iter()
            .map(|c| {
                let Some((lo, hi)) = c
                    .bands
                    .iter()
                    .map(|(j, _)| *j)
                    .fold(None, |acc: Option<(i32, i32)>, j| Some(acc.map_or((j, j), |(a, b)| (a.min(j), b.max(j)))))
                else {
                    return 0.0;
                };
                let mut acc = 0.0;
                let rule = GaussLegendre::cached(32);
                let breaks = log_breaks(lo as f64 - 1.0, hi as f64 + 2.0, &kinks(&self.cutoff, &self.atom));
                for pair in breaks.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        let rho = 0.5 * (a + b) + 0.5 * (b - a) * x;
                        let chat: Complex64 =
                            c.bands.iter().map(|(j, a)| a * self.atom.value(&self.cutoff, rho * (-*j as f64).exp2())).sum();
                        acc += 0.5 * (b - a) * w * (m(rho) * chat).norm_sqr() * rho.powi(n - 1);
                    }
                }
                acc
            })
            .sum()
    }
}

/// Positions of log₂ρ, modulo 1, where the cutoff or the atom is not analytic.
fn kinks(cutoff: &DyadicCutoff, atom: &Atom) -> Vec<f64> {
    let mut out = vec![0.0, cutoff.width, -cutoff.width];
    if let Atom::Bump { width } = atom {
        out.extend([*width, -*width]);
    }
    out
}

/// Points 2^u, u ∈ [lo, hi], at the ends and at every kink.
fn log_breaks(lo: f64, hi: f64, kinks: &[f64]) -> Vec<f64> {
    let mut us = vec![lo, hi];
    for k in lo.floor() as i32 - 1..=hi.ceil() as i32 + 1 {
        us.extend(kinks.iter().map(|c| k as f64 + c).filter(|u| *u > lo && *u < hi));
    }
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    us.into_iter().map(f64::exp2).collect()
}

/// H_ν of the atom and of the three cutoff–atom products at every argument.
fn tabulate(n: usize, nu: f64, cutoff: &DyadicCutoff, atom: &Atom, args: &[f64]) -> OrderTables {
    let half = 0.5 * (n as f64 - 2.0);
    let rule = GaussLegendre::cached(PANEL_ORDER);
    let breaks = log_breaks(-1.0, 1.0, &kinks(cutoff, atom));
    let rows: Vec<[f64; 4]> = args
        .par_iter()
        .map(|&s| {
            if s > PROFILE_REACH {
                return [0.0; 4];
            }
            // ten nodes per wavelength of J_ν(sρ) across ρ ∈ [1/2, 2]
            let total = 4.0 + (1.5 * s / (2.0 * std::f64::consts::PI) * 10.0 / PANEL_ORDER as f64).ceil();
            let mut acc = [0.0; 4];
            for pair in breaks.windows(2) {
                let panels = (total * (pair[1] - pair[0]) / 1.5).ceil() as usize;
                for p in 0..panels {
                    let a = pair[0] + (pair[1] - pair[0]) * p as f64 / panels as f64;
                    let b = pair[0] + (pair[1] - pair[0]) * (p + 1) as f64 / panels as f64;
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        let rho = 0.5 * (a + b) + 0.5 * (b - a) * x;
                        let z = s * rho;
                        let k = 0.5 * (b - a) * w * z.powf(-half) * j_value(nu, z) * rho.powi(n as i32 - 1);
                        let phi = cutoff.value(rho);
                        acc[0] += k * atom.value(cutoff, rho);
                        for (d, slot) in acc[1..].iter_mut().enumerate() {
                            *slot += k * phi * atom.value(cutoff, rho * ((1 - d as i32) as f64).exp2());
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
    OrderTables { nu, atom: col(0), pieces: [col(1), col(2), col(3)] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::CrossSectionSpec;

    fn torus11() -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap()
    }

    fn calculus(atom: Atom, cutoff: DyadicCutoff) -> LpCalculus {
        LpCalculus::new(&torus11(), cutoff, atom, 1.2, (-3, 4), 8).unwrap()
    }

    #[test]
    fn plancherel_per_band() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, -1, 2, 7).unwrap();
        let whole = lp.synthesize(&f).unwrap();
        let spectral = lp.spectral_norm_sq(&f, |_| 1.0);
        assert!((whole.l2_norm_sq() / spectral - 1.0).abs() < 1e-6, "{} vs {spectral}", whole.l2_norm_sq());
        for j in [-1, 1, 3] {
            let pj = lp.project(&f, j).unwrap();
            let want = lp.spectral_norm_sq(&f, |rho| lp.cutoff.at(j, rho));
            assert!((pj.l2_norm_sq() / want - 1.0).abs() < 1e-6, "j {j}: {} vs {want}", pj.l2_norm_sq());
        }
    }

    #[test]
    fn pieces_sum_to_the_function() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, -1, 2, 11).unwrap();
        let whole = lp.synthesize(&f).unwrap();
        let mut sum = lp.project(&f, -2).unwrap();
        for j in lp.active_scales(&f).into_iter().skip(1) {
            let p = lp.project(&f, j).unwrap();
            for (a, b) in sum.components.iter_mut().zip(&p.components) {
                for (x, y) in a.profile.iter_mut().zip(&b.profile) {
                    *x += y;
                }
            }
        }
        let peak = whole.components.iter().flat_map(|c| c.profile.iter()).map(|v| v.norm()).fold(0.0, f64::max);
        assert!(whole.max_deviation(&sum) < 1e-5 * peak);
    }

    #[test]
    fn plateau_projection_keeps_narrow_atoms() {
        let lp = calculus(Atom::Bump { width: 0.4 }, DyadicCutoff::plateau());
        let mut f = BandLimited::random(&lp.model, 1.2, 1, 1, 5).unwrap();
        for c in &mut f.components {
            c.bands.retain(|(j, _)| *j == 1);
        }
        let whole = lp.synthesize(&f).unwrap();
        let p = lp.project(&f, 1).unwrap();
        let peak = whole.components.iter().flat_map(|c| c.profile.iter()).map(|v| v.norm()).fold(0.0, f64::max);
        assert!(whole.max_deviation(&p) < 1e-6 * peak);
        let other = lp.project(&f, 2).unwrap();
        assert!(other.l2_norm_sq() < 1e-20 * whole.l2_norm_sq());
    }

    #[test]
    fn separated_pieces_are_orthogonal() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, -1, 2, 3).unwrap();
        let (a, b) = (lp.project(&f, 0).unwrap(), lp.project(&f, 2).unwrap());
        let inner: Complex64 = a
            .components
            .iter()
            .zip(&b.components)
            .map(|(x, y)| x.profile.iter().zip(&y.profile).zip(&lp.grid.weights).map(|((u, v), w)| u * v.conj() * w).sum::<Complex64>())
            .sum();
        assert!(inner.norm() < 1e-8 * (a.l2_norm_sq() * b.l2_norm_sq()).sqrt(), "{inner}");
    }

    #[test]
    fn bands_outside_the_window_are_refused() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, -3, 0, 1).unwrap();
        assert!(lp.synthesize(&f).is_err());
    }
}
