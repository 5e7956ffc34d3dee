//! The Hankel transform on the cone measure and the functional calculus
//! F(√H) shared by every propagator.

pub mod functional;
pub mod grid;
pub mod hankel;
pub mod norms;

pub use functional::{
    bessel_i_bound, default_budget, kernel_of_function, mode_tail_bound, oscillatory_rule, weber_closed_form, with_growing_table,
    KernelQuery, KernelValue, ModeTable, Multiplier, MAX_NU_BUDGET,
};
pub use grid::{ConeGrid, RadialGrid};
pub use hankel::{adapted_gaussian, adapted_gaussian_propagated, check_tail, hankel_transform, hankel_transform_many, radial_norm_sq};
pub use norms::{cone_lq_norm, gridded_lq_norm, ModeCoefficients, ModeComponent};
