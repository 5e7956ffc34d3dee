use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::SpecFunError;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("geometry unavailable: {0}")]
    GeometryUnavailable(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("budget exceeded: {message} (partial value {partial}, remaining bound {bound:e})")]
    BudgetExceeded { message: String, partial: Complex64, bound: f64 },
    #[error("profile not resolved by grid: {0}")]
    ProfileNotResolved(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ConeError>;
