//! Littlewood–Paley calculus on the cone.

pub mod band;
pub mod cutoff;
pub mod estimates;
pub mod project;

pub use band::{Atom, BandComponent, BandLimited, LpCalculus};
pub use cutoff::{bump, dyadic_cutoff_value, min_square_sum, DyadicCutoff};
pub use estimates::{
    bernstein_ratio, besov_norm, besov_sobolev_constants, check_exponents, sobolev_norm, spectral_besov_norm, square_function_ratio,
    BesovParams,
};
pub use project::{lp_project, lp_project_with};
