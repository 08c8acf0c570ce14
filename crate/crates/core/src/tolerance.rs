//! Numerical tolerances shared across modules.

/// Absolute tolerance when snapping probabilities to 0 or 1 and when
/// classifying a strategy profile as pure, mixed or fully mixed.
pub const CLASSIFY: f64 = 1e-12;

/// Margin a strict existence inequality must clear. Margins within this
/// band of zero are reported as boundary cases and treated as failures.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Default tolerance for the best-response verification of an equilibrium.
pub const VERIFY: f64 = 1e-9;

/// Default tail mass at which Poisson pmfs are truncated.
pub const POISSON_TAIL: f64 = 1e-12;

/// Allowed deviation of `sum(mass) + tail` from 1 for a valid pmf.
pub const PMF_NORMALIZATION: f64 = 1e-9;

/// Negative Poisson-mean estimates at or above `-LAMBDA_FLOOR` are floored
/// to zero with a warning; anything lower is an error.
pub const LAMBDA_FLOOR: f64 = 1e-6;
