//! Propagator kernels on product cones C(Y) with an inverse-square potential,
//! together with numerical probes of their decay estimates.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod cross_section;
pub mod error;
pub mod harness;
pub mod lp_theory;
pub mod propagators;
pub mod quadrature;
pub mod specfun;
pub mod spectral_calculus;
pub mod stats;

pub use error::{ConeError, Result};
