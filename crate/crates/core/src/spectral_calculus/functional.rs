//! Kernels of spectral multipliers F(√H) by separation of variables:
//!
//! F(√H)(z₁, z₂) = (r₁r₂)^{−(n−2)/2} Σ_k φ_k(y₁)φ̄_k(y₂) ∫₀^∞ F(ρ) J_{ν_k}(r₁ρ) J_{ν_k}(r₂ρ) ρ dρ.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cross_section::eigen::harmonic_multiplicity;
use crate::cross_section::spectrum::projectors;
use crate::cross_section::{build_spectrum, ConeModel, CrossSectionKind, SpectralMode, YPoint};
use crate::error::{ConeError, Result};
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::specfun::{bessel_envelope_sup, bessel_i, bessel_small_argument_bound, j_value, ln_gamma, I_MAX_MODULUS};

/// Largest order a mode table is allowed to grow to on its own.
pub const MAX_NU_BUDGET: f64 = 400.0;

/// A kernel evaluation point: time-like parameter t and z_i = (r_i, y_i).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    pub t: f64,
    pub r1: f64,
    pub y1: YPoint,
    pub r2: f64,
    pub y2: YPoint,
}

impl KernelQuery {
    pub fn new(t: f64, r1: f64, y1: YPoint, r2: f64, y2: YPoint) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(ConeError::Domain(format!("radii must be positive, got r1 = {r1}, r2 = {r2}")));
        }
        if !t.is_finite() {
            return Err(ConeError::Domain(format!("t must be finite, got {t}")));
        }
        Ok(KernelQuery { t, r1, y1, r2, y2 })
    }

    /// z = r₁r₂/(2|t|).
    pub fn z(&self) -> f64 {
        self.r1 * self.r2 / (2.0 * self.t.abs())
    }

    /// The query with z₁ and z₂ exchanged.
    pub fn swapped(&self) -> Self {
        KernelQuery { t: self.t, r1: self.r2, y1: self.y2.clone(), r2: self.r1, y2: self.y1.clone() }
    }
}

pub type ProfileFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A spectral multiplier ρ ↦ F(ρ) with what the kernel evaluator needs to
/// know about it.
#[derive(Clone)]
pub enum Multiplier {
    /// F supported in [rho_min, rho_max] ⊂ (0, ∞), |F| ≤ sup, oscillating at
    /// most like e^{i·oscillation·ρ}.
    Compact { f: ProfileFn, rho_min: f64, rho_max: f64, sup: f64, oscillation: f64 },
    /// F(ρ) = e^{−pρ²} with Re p > 0, evaluated by Weber's closed form.
    Gaussian { p: Complex64 },
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Compact { rho_min, rho_max, sup, oscillation, .. } => {
                write!(f, "Compact {{ rho_min: {rho_min}, rho_max: {rho_max}, sup: {sup}, oscillation: {oscillation} }}")
            }
            Multiplier::Gaussian { p } => write!(f, "Gaussian {{ p: {p} }}"),
        }
    }
}

impl Multiplier {
    pub fn compact(
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        rho_min: f64,
        rho_max: f64,
        sup: f64,
        oscillation: f64,
    ) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(ConeError::Domain(format!("support [{rho_min}, {rho_max}] must lie in (0, inf)")));
        }
        Ok(Multiplier::Compact { f: Arc::new(f), rho_min, rho_max, sup, oscillation: oscillation.abs() })
    }

    pub fn eval(&self, rho: f64) -> Complex64 {
        match self {
            Multiplier::Compact { f, rho_min, rho_max, .. } => {
                if rho < *rho_min || rho > *rho_max {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(rho)
                }
            }
            Multiplier::Gaussian { p } => (-p * rho * rho).exp(),
        }
    }
}

/// Weber's second exponential integral
/// ∫₀^∞ e^{−pρ²} J_ν(r₁ρ) J_ν(r₂ρ) ρ dρ = e^{−(r₁²+r₂²)/4p}/(2p) · I_ν(r₁r₂/2p).
pub fn weber_closed_form(nu: f64, p: Complex64, r1: f64, r2: f64, tol: f64) -> Result<Complex64> {
    if !(p.re > 0.0) {
        return Err(ConeError::Domain(format!("Weber form needs Re p > 0, got {p}")));
    }
    let w = r1 * r2 / (2.0 * p);
    let i = bessel_i(nu, w, tol)?;
    Ok((-(r1 * r1 + r2 * r2) / (4.0 * p)).exp() / (2.0 * p) * i.value)
}

/// Bound for |I_ν(w)| from the power series: (|w|/2)^ν/Γ(ν+1)·e^{|w|²/4(ν+1)}.
pub fn bessel_i_bound(nu: f64, w: f64) -> f64 {
    if w == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    (nu * (0.5 * w).ln() - ln_gamma(nu + 1.0) + w * w / (4.0 * (nu + 1.0))).exp()
}

/// A kernel value with the bound on its discarded mode tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub modes_used: usize,
}

/// The spectrum of a model up to a budget ν ≤ nu_budget, with analytic
/// control of everything above it.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub model: ConeModel,
    pub modes: Vec<SpectralMode>,
    pub nu_budget: f64,
}

impl ModeTable {
    pub fn new(model: &ConeModel, nu_budget: f64) -> Result<Self> {
        let modes = build_spectrum(model, nu_budget)?;
        Ok(ModeTable { model: model.clone(), modes, nu_budget })
    }

    /// Σ_{ν_k ≥ nu_start} sup_y Σ|φ|² · g(ν_k) over all modes, the ones above the
    /// budget bounded through `g_rem` (which must not increase beyond the budget).
    pub fn tail_sum(&self, nu_start: f64, g: impl Fn(f64) -> f64, g_rem: impl Fn(f64) -> f64) -> f64 {
        let listed: f64 = self.modes.iter().filter(|m| m.nu >= nu_start).map(|m| m.sup_sum() * g(m.nu)).sum();
        listed + self.remainder(nu_start.max(self.nu_budget), g_rem)
    }

    /// Envelope tail Σ_{ν_k ≥ nu_start} sup Σ|φ|² · sup_{x ≤ z_max}|J_{ν_k}(x)|.
    pub fn tail_bound(&self, z_max: f64, nu_start: f64) -> f64 {
        self.tail_sum(nu_start, |nu| bessel_envelope_sup(nu, z_max), |nu| bessel_small_argument_bound(nu, z_max))
    }

    /// The smallest prefix of the table whose complement is bounded by `tol`,
    /// as (number of modes kept, bound on the rest).
    pub fn cutoff_with(&self, tol: f64, g: impl Fn(f64) -> f64, g_rem: impl Fn(f64) -> f64) -> Option<(usize, f64)> {
        let mut acc = self.remainder(self.nu_budget, g_rem);
        if !(acc <= tol) {
            return None;
        }
        let mut keep = self.modes.len();
        while keep > 0 {
            let next = acc + self.modes[keep - 1].sup_sum() * g(self.modes[keep - 1].nu);
            if next > tol {
                break;
            }
            acc = next;
            keep -= 1;
        }
        Some((keep, acc))
    }

    /// Number of modes needed so that the envelope tail at argument z_max is ≤ tol.
    pub fn cutoff_for(&self, z_max: f64, tol: f64) -> Option<(usize, f64)> {
        self.cutoff_with(tol, |nu| bessel_envelope_sup(nu, z_max), |nu| bessel_small_argument_bound(nu, z_max))
    }

    /// Bound for Σ over modes with ν > from of sup Σ|φ|² · g(ν).
    fn remainder(&self, from: f64, g: impl Fn(f64) -> f64) -> f64 {
        let offset = self.model.a + self.model.shift();
        let volume = self.model.spec.volume();
        match &self.model.spec.kind {
            CrossSectionKind::Custom(_) => 0.0,
            CrossSectionKind::Circle { radius } => lattice_remainder(&[*radius], offset, volume, from, &g),
            CrossSectionKind::Torus { radii } => lattice_remainder(radii, offset, volume, from, &g),
            CrossSectionKind::Sphere { dim, radius } => {
                let mut acc = 0.0;
                let mut prev = f64::INFINITY;
                for l in 0usize.. {
                    let nu = ((l * (l + dim - 1)) as f64 / (radius * radius) + offset).sqrt();
                    if nu <= from {
                        continue;
                    }
                    let gv = g(nu);
                    if gv > prev {
                        return f64::INFINITY;
                    }
                    prev = gv;
                    let term = harmonic_multiplicity(*dim, l) as f64 / volume * gv;
                    acc += term;
                    if term <= 1e-30 * acc || term == 0.0 || l > 200_000 {
                        return if l > 200_000 { f64::INFINITY } else { acc };
                    }
                }
                unreachable!()
            }
        }
    }
}

/// Shell-by-shell bound over lattice levels: every point with ν ≤ X has
/// |m_i| ≤ σ_i X, so at most Π(2σ_i X + 1) of them.
fn lattice_remainder(radii: &[f64], offset: f64, volume: f64, from: f64, g: &impl Fn(f64) -> f64) -> f64 {
    if offset < 0.0 {
        return f64::INFINITY;
    }
    let count = |x: f64| radii.iter().map(|s| 2.0 * s * x + 1.0).product::<f64>();
    let mut acc = 0.0;
    let mut lo = from;
    let mut prev = g(lo);
    for _ in 0..100_000 {
        let hi = lo.floor() + 1.0;
        let gv = g(lo);
        if gv > prev {
            return f64::INFINITY;
        }
        prev = gv;
        let term = count(hi) / volume * gv;
        acc += term;
        if term == 0.0 || term <= 1e-30 * acc {
            return acc;
        }
        lo = hi;
    }
    f64::INFINITY
}

/// mode_tail_bound: Σ over modes with ν ≥ nu_start of
/// sup Σ|φ|² · sup_{x ≤ z_max}|J_ν(x)|.
pub fn mode_tail_bound(model: &ConeModel, z_max: f64, nu_start: f64) -> Result<f64> {
    if !(z_max > 0.0) {
        return Err(ConeError::Domain(format!("z_max must be positive, got {z_max}")));
    }
    let budget = nu_start.max(model.nu0) + 2.0 * z_max + 10.0;
    let table = ModeTable::new(model, budget)?;
    Ok(table.tail_bound(z_max, nu_start))
}

/// Gauss–Legendre nodes on [a, b] with at least ten per wavelength of e^{iωρ}.
pub fn oscillatory_rule(a: f64, b: f64, omega: f64) -> (Vec<f64>, Vec<f64>) {
    let wavelengths = (b - a) * omega / (2.0 * PI);
    let panels = ((10.0 * wavelengths / 16.0).ceil() as usize).max(8);
    let rule = GaussLegendre::cached(16);
    let mut xs = Vec::with_capacity(16 * panels);
    let mut ws = Vec::with_capacity(16 * panels);
    for p in 0..panels {
        let lo = a + (b - a) * p as f64 / panels as f64;
        let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
        rule.push_mapped(lo, hi, &mut xs, &mut ws);
    }
    (xs, ws)
}

impl ModeTable {
    /// Kernel of F(√H) at the query, truncated so the discarded modes
    /// contribute at most `tol`.
    pub fn kernel(&self, f: &Multiplier, q: &KernelQuery, tol: f64) -> Result<KernelValue> {
        let pref = self.prefactor(q);
        let cut = match f {
            Multiplier::Gaussian { p } => {
                let w = q.r1 * q.r2 / (2.0 * p.norm());
                let outer = (-(q.r1 * q.r1 + q.r2 * q.r2) / (4.0 * p)).exp().norm() / (2.0 * p.norm()) * pref;
                let g = |nu: f64| outer * bessel_i_bound(nu, w);
                self.cutoff_with(tol, g, g)
            }
            Multiplier::Compact { rho_min, rho_max, sup, .. } => {
                let zmin = q.r1.min(q.r2) * rho_max;
                let scale = pref * sup * 0.5 * (rho_max * rho_max - rho_min * rho_min);
                self.cutoff_with(tol, |nu| scale * bessel_envelope_sup(nu, zmin), |nu| scale * bessel_small_argument_bound(nu, zmin))
            }
        };
        let Some((keep, bound)) = cut else {
            let partial = self.kernel_prefix(f, q, self.modes.len())?;
            return Err(ConeError::BudgetExceeded {
                message: format!("mode budget nu <= {} cannot resolve the query at r1 = {}, r2 = {}", self.nu_budget, q.r1, q.r2),
                partial,
                bound: f64::INFINITY,
            });
        };
        Ok(KernelValue { value: self.kernel_prefix(f, q, keep)?, tail_bound: bound, modes_used: keep })
    }

    fn prefactor(&self, q: &KernelQuery) -> f64 {
        (q.r1 * q.r2).powf(-0.5 * (self.model.n as f64 - 2.0))
    }

    /// The kernel sum over the first `keep` modes.
    pub fn kernel_prefix(&self, f: &Multiplier, q: &KernelQuery, keep: usize) -> Result<Complex64> {
        let modes = &self.modes[..keep.min(self.modes.len())];
        let per_mode: Vec<Complex64> = match f {
            Multiplier::Gaussian { p } => {
                if !(p.re > 0.0) {
                    return Err(ConeError::Domain(format!("Gaussian multiplier needs Re p > 0, got {p}")));
                }
                let w = q.r1 * q.r2 / (2.0 * p.norm());
                if w > I_MAX_MODULUS {
                    return Err(ConeError::Domain(format!("|r1 r2 / 2p| = {w} exceeds {I_MAX_MODULUS}")));
                }
                let vals: Result<Vec<Complex64>> = modes.par_iter().map(|m| weber_closed_form(m.nu, *p, q.r1, q.r2, 1e-14)).collect();
                vals?
            }
            Multiplier::Compact { rho_min, rho_max, oscillation, .. } => {
                let (xs, ws) = oscillatory_rule(*rho_min, *rho_max, oscillation + q.r1 + q.r2);
                let fw: Vec<Complex64> = xs.iter().zip(&ws).map(|(x, w)| f.eval(*x) * w * x).collect();
                modes
                    .par_iter()
                    .map(|m| {
                        let terms: Vec<Complex64> = xs
                            .iter()
                            .zip(&fw)
                            .map(|(x, fw)| {
                                let j1 = j_value(m.nu, q.r1 * x);
                                let j2 = if q.r1 == q.r2 { j1 } else { j_value(m.nu, q.r2 * x) };
                                fw * (j1 * j2)
                            })
                            .collect();
                        pairwise_sum(&terms)
                    })
                    .collect()
            }
        };
        let proj = projectors(modes, &q.y1, &q.y2);
        let terms: Vec<Complex64> = proj.iter().zip(&per_mode).map(|(p, v)| p * v).collect();
        Ok(self.prefactor(q) * pairwise_sum(&terms))
    }
}

/// Order needed before the tail of a Bessel sum at argument z becomes negligible.
pub fn default_budget(model: &ConeModel, z: f64) -> f64 {
    model.nu0 + 1.3 * z + 6.0 * z.max(1.0).cbrt() + 20.0
}

/// F(√H)(z₁, z₂), growing the mode table until the tail is below `tol` or
/// the budget cap is reached.
pub fn kernel_of_function(model: &ConeModel, f: &Multiplier, q: &KernelQuery, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(ConeError::Domain(format!("tol must be positive, got {tol}")));
    }
    let z = match f {
        Multiplier::Gaussian { p } => q.r1 * q.r2 / (2.0 * p.norm()),
        Multiplier::Compact { rho_max, .. } => q.r1.min(q.r2) * rho_max,
    };
    with_growing_table(model, default_budget(model, z), MAX_NU_BUDGET, |table| table.kernel(f, q, tol).map(|v| v.value))
}

/// Runs `f` on tables of growing budget, starting at `start`, while it
/// reports an exceeded budget and the cap allows.
pub fn with_growing_table<T>(model: &ConeModel, start: f64, cap: f64, mut f: impl FnMut(&ModeTable) -> Result<T>) -> Result<T> {
    let mut budget = start.max(model.nu0);
    loop {
        let table = ModeTable::new(model, budget.min(cap))?;
        match f(&table) {
            Err(ConeError::BudgetExceeded { .. }) if budget < cap => budget *= 1.5,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{CrossSectionSpec, CustomSpectrum};

    fn torus11(a: f64) -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), a).unwrap()
    }

    fn single_mode(nu: f64) -> ConeModel {
        // custom mu is the Laplace eigenvalue; ν² = mu + a + 1/4 on a 3-cone
        let spec = CrossSectionSpec::custom(CustomSpectrum::constant_only(2, 4.0 * PI * PI));
        ConeModel::new(3, spec, nu * nu - 0.25).unwrap()
    }

    #[test]
    fn tail_bound_examples() {
        let m = torus11(0.0);
        let b40 = mode_tail_bound(&m, 1.0, 40.0).unwrap();
        assert!(b40 < 1e-10, "{b40}");
        let first = mode_tail_bound(&m, 1.0, m.nu0).unwrap();
        let vol = 4.0 * PI * PI;
        assert!(first >= j_value(0.5, 1.0).abs() / vol);
        let mut prev = f64::INFINITY;
        for start in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let b = mode_tail_bound(&m, 3.0, start).unwrap();
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn gaussian_single_mode_matches_weber() {
        let m = single_mode(1.0);
        let y = YPoint::angles(&[0.0, 0.0]);
        let q = KernelQuery::new(0.0, 0.7, y.clone(), 1.3, y).unwrap();
        let got = kernel_of_function(&m, &Multiplier::Gaussian { p: Complex64::new(1.0, 0.0) }, &q, 1e-12).unwrap();
        // Weber with ε = 1, t = 0, written out through I_1 directly
        let x = 0.7 * 1.3 / 2.0;
        let i1 = crate::specfun::bessel_i(1.0, Complex64::new(x, 0.0), 1e-14).unwrap().value;
        let want = (0.7f64 * 1.3).powf(-0.5) / (4.0 * PI * PI) * (-(0.49f64 + 1.69) / 4.0).exp() / 2.0 * i1;
        assert!((got - want).norm() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn compact_multiplier_matches_direct_quadrature() {
        let m = single_mode(1.5);
        let y = YPoint::angles(&[0.0, 0.0]);
        let q = KernelQuery::new(0.0, 0.9, y.clone(), 2.1, y).unwrap();
        let f = Multiplier::compact(|r| Complex64::new((r - 1.0) * (3.0 - r), 0.0), 1.0, 3.0, 1.0, 0.0).unwrap();
        let got = kernel_of_function(&m, &f, &q, 1e-12).unwrap();
        let direct = crate::quadrature::adaptive(
            |r| Complex64::new((r - 1.0) * (3.0 - r) * j_value(1.5, 0.9 * r) * j_value(1.5, 2.1 * r) * r, 0.0),
            1.0,
            3.0,
            1e-14,
            1000,
        );
        let want = direct.value * (0.9f64 * 2.1).powf(-0.5) / (4.0 * PI * PI);
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn diagonal_of_squared_bump_is_nonnegative_and_hermitian() {
        let m = torus11(0.0);
        let bump = |r: f64| {
            let u = (r - 2.0) / 1.0;
            if u.abs() < 1.0 {
                (-1.0 / (1.0 - u * u)).exp().powi(2)
            } else {
                0.0
            }
        };
        let f = Multiplier::compact(move |r| Complex64::new(bump(r), 0.0), 1.0, 3.0, 1.0, 0.0).unwrap();
        let y1 = YPoint::angles(&[0.3, 1.0]);
        let y2 = YPoint::angles(&[2.0, -0.5]);
        let d = kernel_of_function(&m, &f, &KernelQuery::new(0.0, 1.2, y1.clone(), 1.2, y1.clone()).unwrap(), 1e-10).unwrap();
        assert!(d.re > 0.0 && d.im.abs() < 1e-14);
        let q = KernelQuery::new(0.0, 0.8, y1, 1.7, y2).unwrap();
        let a = kernel_of_function(&m, &f, &q, 1e-10).unwrap();
        let b = kernel_of_function(&m, &f, &q.swapped(), 1e-10).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn truncation_is_honest() {
        let m = torus11(0.0);
        let y1 = YPoint::angles(&[0.3, 1.0]);
        let y2 = YPoint::angles(&[0.4, 0.8]);
        let q = KernelQuery::new(0.0, 1.0, y1, 1.5, y2).unwrap();
        let f = Multiplier::Gaussian { p: Complex64::new(0.2, 0.3) };
        let small = ModeTable::new(&m, 30.0).unwrap().kernel(&f, &q, 1e-6).unwrap();
        let big = ModeTable::new(&m, 60.0).unwrap().kernel(&f, &q, 1e-13).unwrap();
        assert!(small.modes_used < big.modes_used);
        assert!((small.value - big.value).norm() <= small.tail_bound + big.tail_bound);
    }

    #[test]
    fn bounded_multiplier_is_a_contraction() {
        // discretised radial operator of e^{−ρ²} on one mode, applied to random data
        use rand::{Rng, SeedableRng};
        let spec = CrossSectionSpec::custom(CustomSpectrum::constant_only(2, 1.0));
        let m = ConeModel::new(3, spec, 0.3).unwrap();
        let rg = super::super::RadialGrid::graded(3, 192, 10.0).unwrap();
        let y = YPoint::angles(&[0.0, 0.0]);
        let table = ModeTable::new(&m, 2.0).unwrap();
        let f = Multiplier::Gaussian { p: Complex64::new(1.0, 0.0) };
        let np = rg.len();
        let k: Vec<Complex64> = (0..np * np)
            .map(|ij| {
                let q = KernelQuery::new(0.0, rg.nodes[ij / np], y.clone(), rg.nodes[ij % np], y.clone()).unwrap();
                table.kernel(&f, &q, 1e-14).unwrap().value
            })
            .collect();
        let norm = |x: &[Complex64]| x.iter().zip(&rg.weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let v: Vec<Complex64> = (0..np)
                .map(|i| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-0.1 * rg.nodes[i].powi(2)).exp())
                .collect();
            let out: Vec<Complex64> = (0..np).map(|i| (0..np).map(|j| k[i * np + j] * v[j] * rg.weights[j]).sum()).collect();
            assert!(norm(&out) <= norm(&v) * (1.0 + 1e-6), "{} > {}", norm(&out), norm(&v));
        }
    }
}
