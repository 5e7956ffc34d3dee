//! Run configuration: a JSON document with keys model, scan, tolerances, seed.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::io_context;
use crate::cross_section::{ConeModel, CrossSectionSpec, CustomSpectrum, EvaluatorRegistry};
use crate::error::{ConeError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossSectionKind {
    Circle,
    Torus,
    Sphere,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: CrossSectionKind,
    #[serde(default)]
    pub params: serde_json::Value,
    pub n: usize,
    #[serde(default)]
    pub a: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadiusParams {
    radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusParams {
    radii: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomParams {
    /// Path of the eigenvalue table, relative to the config file.
    file: String,
    volume: f64,
}

fn params<T: serde::de::DeserializeOwned>(kind: &str, value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| ConeError::Config(format!("model.params for {kind}: {e}")))
}

impl ModelConfig {
    /// Builds the model; relative custom-spectrum paths resolve against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<ConeModel> {
        let dim = self.n.checked_sub(1).ok_or_else(|| ConeError::Config("model.n must be at least 3".into()))?;
        let spec = match self.kind {
            CrossSectionKind::Circle => CrossSectionSpec::circle(params::<RadiusParams>("circle", &self.params)?.radius)?,
            CrossSectionKind::Torus => CrossSectionSpec::torus(&params::<TorusParams>("torus", &self.params)?.radii)?,
            CrossSectionKind::Sphere => CrossSectionSpec::sphere(dim, params::<RadiusParams>("sphere", &self.params)?.radius)?,
            CrossSectionKind::Custom => {
                let p = params::<CustomParams>("custom", &self.params)?;
                let path = base.map_or_else(|| Path::new(&p.file).to_path_buf(), |b| b.join(&p.file));
                let text =
                    std::fs::read_to_string(&path).map_err(|e| io_context(e, format!("reading custom spectrum {}", path.display())))?;
                CrossSectionSpec::custom(CustomSpectrum::parse(&text, dim, p.volume, &EvaluatorRegistry::new())?)
            }
        };
        ConeModel::new(self.n, spec, self.a)
    }
}

/// Scan parameters. Every field is optional; commands fill in their own
/// defaults, which reproduce the acceptance suite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Times t for Schrödinger scans.
    pub t_samples: Option<Vec<f64>>,
    /// Radii used to build (r₁, r₂) pairs.
    pub r_samples: Option<Vec<f64>>,
    /// Which of the eight standard Y pairs to use.
    pub y_pairs: Option<Vec<usize>>,
    /// Schrödinger scan regime: dispersive, small-z, large-z or representation.
    pub regime: Option<String>,
    /// [min, max] and sample count for z scans.
    pub z_range: Option<[f64; 2]>,
    pub z_count: Option<usize>,
    /// Heat times σ.
    pub sigma_samples: Option<Vec<f64>>,
    /// Gaussian width c of the heat bound.
    pub heat_width: Option<f64>,
    /// Poisson-wave s segments, each [min, max], and points per segment.
    pub s_segments: Option<Vec<[f64; 2]>>,
    pub s_count: Option<usize>,
    /// Half-wave frequency scales and the 2^j t range.
    pub j_values: Option<Vec<i32>>,
    pub phase_range: Option<[f64; 2]>,
    pub phase_count: Option<usize>,
    /// Largest ν kept in spectra and mode tables.
    pub nu_budget: Option<f64>,
    /// Eigenvalue count for the Weyl fit.
    pub weyl_modes: Option<usize>,
    /// Distance-spectrum cutoff.
    pub distance_cutoff: Option<f64>,
    /// Littlewood–Paley scale window and projected scales.
    pub j_window: Option<[i32; 2]>,
    pub j_range: Option<[i32; 2]>,
    /// Atom scales of random band-limited functions.
    pub band_range: Option<[i32; 2]>,
    pub functions: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub besov: Option<BesovConfig>,
    /// Largest ν of the eigenfunctions in random test data.
    pub data_nu_max: Option<f64>,
    /// Orders for Hankel checks.
    pub nus: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovConfig {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Kernel evaluation accuracy, relative to the natural scale of each kernel.
    pub kernel: f64,
    /// Allowed slope deviation from the target.
    pub slope: f64,
    /// Largest accepted max/min of a bounded quantity.
    pub boundedness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { kernel: 1e-9, slope: 0.15, boundedness: 3.0 }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConeError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_context(e, format!("reading {}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.kernel > 0.0 && t.kernel < 1.0) {
            return Err(ConeError::Config(format!("tolerances.kernel must lie in (0, 1), got {}", t.kernel)));
        }
        if !(t.slope > 0.0) || !(t.boundedness >= 1.0) {
            return Err(ConeError::Config("tolerances.slope must be positive and tolerances.boundedness at least 1".into()));
        }
        let s = &self.scan;
        let positive = |name: &str, v: &Option<Vec<f64>>| -> Result<()> {
            match v {
                Some(xs) if xs.is_empty() || xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) => {
                    Err(ConeError::Config(format!("scan.{name} must be a nonempty list of positive numbers")))
                }
                _ => Ok(()),
            }
        };
        positive("r_samples", &s.r_samples)?;
        positive("sigma_samples", &s.sigma_samples)?;
        if let Some(ts) = &s.t_samples {
            if ts.is_empty() || ts.iter().any(|t| *t == 0.0 || !t.is_finite()) {
                return Err(ConeError::Config("scan.t_samples must be a nonempty list of nonzero times".into()));
            }
        }
        for (name, range) in [("z_range", s.z_range), ("phase_range", s.phase_range)] {
            if let Some([lo, hi]) = range {
                if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(ConeError::Config(format!("scan.{name} must satisfy 0 < min < max")));
                }
            }
        }
        if let Some(pairs) = &s.y_pairs {
            if pairs.is_empty() || pairs.iter().any(|&i| i >= 8) {
                return Err(ConeError::Config("scan.y_pairs must list indices in 0..8".into()));
            }
        }
        if let Some(r) = &s.regime {
            if !["dispersive", "small-z", "large-z", "representation"].contains(&r.as_str()) {
                return Err(ConeError::Config(format!("scan.regime must be one of dispersive, small-z, large-z, representation; got {r}")));
            }
        }
        for (name, range) in [("j_window", s.j_window), ("j_range", s.j_range), ("band_range", s.band_range)] {
            if let Some([lo, hi]) = range {
                if hi < lo {
                    return Err(ConeError::Config(format!("scan.{name} must satisfy min <= max")));
                }
            }
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configs serialize");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = r#"{"model": {"kind": "torus", "params": {"radii": [1, 1]}, "n": 3, "a": 0}, "seed": 4}"#;

    #[test]
    fn parses_and_builds() {
        let c = RunConfig::parse(TORUS).unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.tolerances, Tolerances::default());
        let m = c.model.build(None).unwrap();
        assert_eq!(m.nu0, 0.5);
        assert_eq!(c.hash(), RunConfig::parse(TORUS).unwrap().hash());
        assert_eq!(c.hash().len(), 16);
    }

    #[test]
    fn rejects_unknown_and_invalid_fields() {
        let extra = r#"{"model": {"kind": "torus", "params": {"radii": [1, 1]}, "n": 3}, "colour": 1}"#;
        let e = RunConfig::parse(extra).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let bad_params = r#"{"model": {"kind": "sphere", "params": {"radii": [1]}, "n": 3}}"#;
        let e = RunConfig::parse(bad_params).unwrap().model.build(None).unwrap_err().to_string();
        assert!(e.contains("radii"), "{e}");
        let bad_scan = r#"{"model": {"kind": "torus", "params": {"radii": [1, 1]}, "n": 3}, "scan": {"r_samples": [1, -2]}}"#;
        assert!(RunConfig::parse(bad_scan).unwrap_err().to_string().contains("r_samples"));
        let bad_regime = r#"{"model": {"kind": "torus", "params": {"radii": [1, 1]}, "n": 3}, "scan": {"regime": "huge"}}"#;
        assert!(RunConfig::parse(bad_regime).is_err());
    }

    #[test]
    fn custom_spectrum_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("spec.txt"), "0 1 const\n").unwrap();
        let text = r#"{"model": {"kind": "custom", "params": {"file": "spec.txt", "volume": 2.0}, "n": 3, "a": 0.5}}"#;
        let m = RunConfig::parse(text).unwrap().model.build(Some(dir.path())).unwrap();
        assert!((m.nu0 - 0.75f64.sqrt()).abs() < 1e-15);
    }
}
