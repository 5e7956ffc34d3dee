//! Externally supplied spectra: a text table of (mu, multiplicity,
//! eigenfunction-id) rows whose ids resolve against a registry of evaluators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use super::YPoint;
use crate::error::{ConeError, Result};

/// An orthonormal family of eigenfunctions on Y, indexed by a label.
pub trait EigenfunctionEvaluator: Debug + Send + Sync {
    /// Number of labels, i.e. the multiplicity this evaluator spans.
    fn labels(&self) -> usize {
        1
    }
    fn eval(&self, y: &YPoint, label: usize) -> Complex64;
    /// sup over Y of |φ_label|, the same for every label.
    fn sup_norm(&self) -> f64;
}

/// φ ≡ vol(Y)^{−1/2}.
#[derive(Debug, Clone)]
pub struct ConstantEvaluator {
    pub volume: f64,
}

impl EigenfunctionEvaluator for ConstantEvaluator {
    fn eval(&self, _y: &YPoint, _label: usize) -> Complex64 {
        Complex64::new(self.volume.sqrt().recip(), 0.0)
    }

    fn sup_norm(&self) -> f64 {
        self.volume.sqrt().recip()
    }
}

/// e^{i m·θ} / (2π)^{d/2} on the torus with unit radii.
#[derive(Debug, Clone)]
pub struct PlaneWave {
    pub m: Vec<i64>,
}

impl EigenfunctionEvaluator for PlaneWave {
    fn eval(&self, y: &YPoint, _label: usize) -> Complex64 {
        let phase: f64 = self.m.iter().zip(&y.coords).map(|(m, t)| *m as f64 * t).sum();
        Complex64::from_polar(self.sup_norm(), phase)
    }

    fn sup_norm(&self) -> f64 {
        (2.0 * PI).powf(-0.5 * self.m.len() as f64)
    }
}

/// Named evaluators. `const` and `plane:m1,…,md` are always available.
#[derive(Debug, Clone, Default)]
pub struct EvaluatorRegistry {
    named: BTreeMap<String, Arc<dyn EigenfunctionEvaluator>>,
}

impl EvaluatorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: &str, evaluator: Arc<dyn EigenfunctionEvaluator>) {
        self.named.insert(id.to_string(), evaluator);
    }

    pub fn resolve(&self, id: &str, volume: f64) -> Result<Arc<dyn EigenfunctionEvaluator>> {
        if let Some(e) = self.named.get(id) {
            return Ok(e.clone());
        }
        if id == "const" {
            return Ok(Arc::new(ConstantEvaluator { volume }));
        }
        if let Some(rest) = id.strip_prefix("plane:") {
            let m: std::result::Result<Vec<i64>, _> = rest.split(',').map(|s| s.trim().parse::<i64>()).collect();
            return match m {
                Ok(m) if !m.is_empty() => Ok(Arc::new(PlaneWave { m })),
                _ => Err(ConeError::Domain(format!("bad plane-wave id {id:?}"))),
            };
        }
        Err(ConeError::Domain(format!("unknown eigenfunction id {id:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomRow {
    pub mu: f64,
    pub multiplicity: usize,
    pub eigenfunction_id: String,
}

/// A user-supplied spectrum on a cross-section of given dimension and volume.
#[derive(Debug, Clone)]
pub struct CustomSpectrum {
    pub dim: usize,
    pub volume: f64,
    pub rows: Vec<CustomRow>,
    pub evaluators: Vec<Arc<dyn EigenfunctionEvaluator>>,
}

impl CustomSpectrum {
    pub fn from_rows(dim: usize, volume: f64, rows: Vec<CustomRow>, registry: &EvaluatorRegistry) -> Result<Self> {
        if dim == 0 || !(volume > 0.0) {
            return Err(ConeError::Domain(format!("custom spectrum needs dim >= 1 and volume > 0, got {dim}, {volume}")));
        }
        if rows.is_empty() {
            return Err(ConeError::Domain("custom spectrum has no rows".into()));
        }
        let mut evaluators = Vec::with_capacity(rows.len());
        for row in &rows {
            if !row.mu.is_finite() || row.multiplicity == 0 {
                return Err(ConeError::Domain(format!("bad custom row {row:?}")));
            }
            let e = registry.resolve(&row.eigenfunction_id, volume)?;
            if e.labels() != row.multiplicity {
                return Err(ConeError::Domain(format!(
                    "evaluator {:?} spans {} functions but the row declares multiplicity {}",
                    row.eigenfunction_id,
                    e.labels(),
                    row.multiplicity
                )));
            }
            evaluators.push(e);
        }
        Ok(CustomSpectrum { dim, volume, rows, evaluators })
    }

    /// Parses rows `mu multiplicity id`, separated by whitespace or commas
    /// outside the id; `#` starts a comment.
    pub fn parse(text: &str, dim: usize, volume: f64, registry: &EvaluatorRegistry) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, |c: char| c.is_whitespace() || c == ';');
            let bad = || ConeError::Domain(format!("line {}: expected `mu multiplicity id`, got {raw:?}", i + 1));
            let mu = parts.next().and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(bad)?;
            let multiplicity = parts.next().and_then(|s| s.trim().parse::<usize>().ok()).ok_or_else(bad)?;
            let id = parts.next().map(str::trim).filter(|s| !s.is_empty()).ok_or_else(bad)?;
            rows.push(CustomRow { mu, multiplicity, eigenfunction_id: id.to_string() });
        }
        Self::from_rows(dim, volume, rows, registry)
    }

    /// One constant mode with μ = 0.
    pub fn constant_only(dim: usize, volume: f64) -> Self {
        let rows = vec![CustomRow { mu: 0.0, multiplicity: 1, eigenfunction_id: "const".into() }];
        Self::from_rows(dim, volume, rows, &EvaluatorRegistry::new()).expect("constant spectrum is valid")
    }
}
