//! Special functions: Γ, Bessel J_ν of real order, modified Bessel I_ν of
//! complex argument, and the calibrated Bessel envelopes.

use num_complex::Complex64;
use thiserror::Error;

pub mod bessel_i;
pub mod bessel_j;
pub mod envelope;
pub mod gamma;
pub mod integral_rep;

pub use bessel_i::{bessel_i, bessel_i_scaled_real, I_MAX_MODULUS};
pub use bessel_j::{bessel_j, bessel_j_derivative, j_value};
pub use envelope::{
    bessel_derivative_envelope, bessel_envelope, bessel_envelope_sup, bessel_small_argument_bound, check_envelopes, envelope_table,
    EnvelopeCheck, EnvelopeTable,
};
pub use gamma::{gamma, ln_gamma};
pub use integral_rep::{i_integral_representation, verify_i_integral_representation};

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Series,
    Asymptotic,
    Quadrature,
    /// Backward recurrence in the order (Miller's algorithm).
    Recurrence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("magnitude overflow: {0}")]
    Overflow(String),
    #[error("out of validated range: {0}")]
    OutOfRange(String),
    #[error("precision loss: best value {} with error estimate {:e}", .0.value, .0.abs_error_estimate)]
    PrecisionLoss(EvalResult),
}
