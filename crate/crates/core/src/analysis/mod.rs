//! Numerical checks of the comparison principle, a priori estimates, boundary
//! barriers and the flux identity.

mod barrier;
mod estimates;
mod flux;

pub use barrier::{barrier_b_ladder, build_barrier, BarrierConditions, BarrierSpec};
pub use estimates::{
    bowl_height, check_comparison, check_gradient_location, check_height_estimate, ComparisonReport, GradientReport,
    HeightReport,
};
pub use flux::{check_flux_identity, FluxReport};

/// Slack for pointwise orderings, in units of `h²`.
pub const ORDER_SLACK: f64 = 10.0;
/// Slack for gradient location, in units of `h`.
pub const GRADIENT_SLACK: f64 = 5.0;
/// Relative flux mismatch allowed, in units of `h`.
pub const FLUX_SLACK: f64 = 5.0;
