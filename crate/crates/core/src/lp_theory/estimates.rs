//! Besov norms, Bernstein ratios and square functions of band-limited data.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::band::{BandLimited, LpCalculus};
use crate::cross_section::ConeModel;
use crate::error::{ConeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() || !(p >= 1.0 && p.is_finite()) || !(r >= 1.0 && r.is_finite()) {
            return Err(ConeError::Domain(format!("Besov exponents need finite s and p, r in [1, inf), got ({s}, {p}, {r})")));
        }
        Ok(BesovParams { s, p, r })
    }
}

/// (Σ_j 2^{jsr}‖φ_j(√H)f‖_p^r)^{1/r} over the scales where φ_j f ≠ 0.
pub fn besov_norm(lp: &LpCalculus, f: &BandLimited, params: &BesovParams) -> Result<f64> {
    let BesovParams { s, p, r } = BesovParams::new(params.s, params.p, params.r)?;
    let terms = lp
        .active_scales(f)
        .par_iter()
        .map(|&j| Ok((j as f64 * s * r).exp2() * lp.lp_norm(&lp.project(f, j)?, p)?.powf(r)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>().powf(1.0 / r))
}

/// ‖f‖_{Ḣ^s} = ‖ρ^s f̂‖ on the spectral side.
pub fn sobolev_norm(lp: &LpCalculus, f: &BandLimited, s: f64) -> f64 {
    lp.spectral_norm_sq(f, |rho| rho.powf(s)).sqrt()
}

/// (Σ_j 2^{2js}‖φ_j f‖₂²)^{1/2} on the spectral side.
pub fn spectral_besov_norm(lp: &LpCalculus, f: &BandLimited, s: f64) -> f64 {
    lp.active_scales(f)
        .iter()
        .map(|&j| (2.0 * j as f64 * s).exp2() * lp.spectral_norm_sq(f, |rho| lp.cutoff.at(j, rho)))
        .sum::<f64>()
        .sqrt()
}

/// The admissible range q′(α) < q ≤ p < q(α).
pub fn check_exponents(model: &ConeModel, q: f64, p: f64) -> Result<()> {
    let upper = model.q_alpha;
    let lower = if upper.is_finite() { upper / (upper - 1.0) } else { 1.0 };
    if !(q >= 1.0) {
        return Err(ConeError::Domain(format!("q = {q} must be at least 1")));
    }
    if upper.is_finite() && !(q > lower) {
        return Err(ConeError::Domain(format!("q = {q} violates q > q'(alpha) = {lower}")));
    }
    if !(q <= p) {
        return Err(ConeError::Domain(format!("q = {q} violates q <= p = {p}")));
    }
    if !(p < upper) {
        return Err(ConeError::Domain(format!("p = {p} violates p < q(alpha) = {upper}")));
    }
    Ok(())
}

/// ‖φ_j f‖_p / (2^{nj(1/q−1/p)}‖φ_j f‖_q).
pub fn bernstein_ratio(lp: &LpCalculus, f: &BandLimited, j: i32, p: f64, q: f64) -> Result<f64> {
    check_exponents(&lp.model, q, p)?;
    let pj = lp.values(&lp.project(f, j)?)?;
    let (np, nq) = (lp.gridded_norm(&pj, p)?, lp.gridded_norm(&pj, q)?);
    if !(nq > 0.0) {
        return Err(ConeError::Domain(format!("projection at scale {j} vanishes")));
    }
    if p == q {
        return Ok(1.0);
    }
    let n = lp.model.n as f64;
    Ok(np / ((n * j as f64 * (1.0 / q - 1.0 / p)).exp2() * nq))
}

/// ‖(Σ_j|φ_j f|²)^{1/2}‖_p / ‖f‖_p.
pub fn square_function_ratio(lp: &LpCalculus, f: &BandLimited, p: f64) -> Result<f64> {
    check_exponents(&lp.model, p, p)?;
    let pieces = lp.active_scales(f).par_iter().map(|&j| lp.values(&lp.project(f, j)?)).collect::<Result<Vec<_>>>()?;
    let Some(first) = pieces.first() else {
        return Err(ConeError::Domain("square function of the zero function".into()));
    };
    let square: Vec<Complex64> =
        (0..first.len()).map(|i| Complex64::new(pieces.iter().map(|v| v[i].norm_sqr()).sum::<f64>().sqrt(), 0.0)).collect();
    let whole = lp.values(&lp.synthesize(f)?)?;
    Ok(lp.gridded_norm(&square, p)? / lp.gridded_norm(&whole, p)?)
}

/// min and max over ρ of Σ_j 2^{2js}φ_j(ρ)²/ρ^{2s}, which bracket the ratio
/// of the p = r = 2 Besov norm to the Ḣ^s norm.
pub fn besov_sobolev_constants(lp: &LpCalculus, s: f64) -> (f64, f64) {
    (0..=2000)
        .map(|i| {
            let rho = (i as f64 / 2000.0).exp2();
            let sum: f64 = lp.cutoff.active_scales(rho).iter().map(|&j| (2.0 * j as f64 * s).exp2() * lp.cutoff.at(j, rho).powi(2)).sum();
            sum / rho.powf(2.0 * s)
        })
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::CrossSectionSpec;
    use crate::lp_theory::{min_square_sum, Atom, DyadicCutoff};

    fn torus11() -> ConeModel {
        ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), 0.0).unwrap()
    }

    fn calculus(atom: Atom, cutoff: DyadicCutoff) -> LpCalculus {
        LpCalculus::new(&torus11(), cutoff, atom, 1.2, (-3, 5), 8).unwrap()
    }

    fn single_band(lp: &LpCalculus, j: i32, seed: u64) -> BandLimited {
        BandLimited::random(&lp.model, 1.2, j, j, seed).unwrap()
    }

    #[test]
    fn besov_matches_spectral_side() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, -1, 3, 4).unwrap();
        for s in [0.0, 0.5, -0.7] {
            let b = besov_norm(&lp, &f, &BesovParams::new(s, 2.0, 2.0).unwrap()).unwrap();
            let want = spectral_besov_norm(&lp, &f, s);
            assert!((b / want - 1.0).abs() < 1e-5, "s {s}: {b} vs {want}");
            let (lo, hi) = besov_sobolev_constants(&lp, s);
            let ratio = b / sobolev_norm(&lp, &f, s);
            assert!(ratio >= lo.sqrt() * (1.0 - 1e-6) && ratio <= hi.sqrt() * (1.0 + 1e-6), "{ratio} not in [{lo}, {hi}]");
        }
        let scaled = besov_norm(&lp, &f.scaled(Complex64::new(0.0, 3.0)), &BesovParams::new(0.5, 4.0, 1.0).unwrap()).unwrap();
        let plain = besov_norm(&lp, &f, &BesovParams::new(0.5, 4.0, 1.0).unwrap()).unwrap();
        assert!((scaled / plain - 3.0).abs() < 1e-12);
        assert!(BesovParams::new(0.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn single_band_besov_is_one_term() {
        let lp = calculus(Atom::Bump { width: 0.4 }, DyadicCutoff::plateau());
        let mut f = single_band(&lp, 2, 9);
        for c in &mut f.components {
            c.bands.retain(|(j, _)| *j == 2);
        }
        let s = 0.75;
        let b = besov_norm(&lp, &f, &BesovParams::new(s, 3.0, 2.0).unwrap()).unwrap();
        let direct = (2.0 * s).exp2() * lp.lp_norm(&lp.synthesize(&f).unwrap(), 3.0).unwrap();
        assert!((b / direct - 1.0).abs() < 1e-6, "{b} vs {direct}");
        let sq = square_function_ratio(&lp, &f, 2.0).unwrap();
        assert!((sq - 1.0).abs() < 1e-6, "{sq}");
    }

    #[test]
    fn bernstein_equal_exponents_and_window() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let f = BandLimited::random(&lp.model, 1.2, 0, 2, 1).unwrap();
        assert_eq!(bernstein_ratio(&lp, &f, 1, 3.0, 3.0).unwrap(), 1.0);
        let r = bernstein_ratio(&lp, &f, 1, 4.0, 2.0).unwrap();
        assert!(r > 0.0 && r.is_finite());
        let negative = ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), -0.2).unwrap();
        assert!(negative.q_alpha.is_finite());
        let err = check_exponents(&negative, 2.0, negative.q_alpha + 1.0).unwrap_err();
        assert!(err.to_string().contains("q(alpha)"), "{err}");
        let err = check_exponents(&negative, 1.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("q'(alpha)"), "{err}");
        assert!(check_exponents(&lp.model, 3.0, 2.0).is_err());
    }

    #[test]
    fn square_function_at_two_lies_in_the_partition_window() {
        let lp = calculus(Atom::Cutoff, DyadicCutoff::standard());
        let lo = min_square_sum(&lp.cutoff).sqrt();
        for seed in 0..3 {
            let f = BandLimited::random(&lp.model, 1.2, -1, 3, seed).unwrap();
            let r = square_function_ratio(&lp, &f, 2.0).unwrap();
            assert!(r >= lo - 1e-6 && r <= 1.0 + 1e-6, "{r}");
        }
    }
}
