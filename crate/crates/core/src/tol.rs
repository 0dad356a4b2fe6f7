//! Numerical tolerances shared across the crate.
//!
//! Values are absolute and in the units of the quantity they guard
//! (matrix entries, probabilities, or bits).

/// Hermiticity, trace, idempotence and reconstruction checks.
pub const MATRIX: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_CLIP, 0)` are numerical drift and clipped to zero;
/// anything more negative marks an invalid state.
pub const EIGEN_CLIP: f64 = 1e-9;

/// Probabilities in `[-PROB_CLIP, 1 + PROB_CLIP]` are accepted and clipped to `[0, 1]`.
pub const PROB_CLIP: f64 = 1e-10;

/// Allowed deviation of a probability vector's sum from one.
pub const PROB_SUM: f64 = 1e-9;

/// Outcomes rarer than this are dropped from an outcome ensemble.
pub const ZERO_OUTCOME: f64 = 1e-12;

/// Classical correlations at or below this count as zero when forming `k_opt`.
pub const CLASSICAL_ZERO: f64 = 1e-9;

/// Ratios this close to an integer are rounded before flooring.
pub const RATIO_INTEGER: f64 = 1e-9;

/// Window in which slightly negative discord is clamped to zero.
pub const DISCORD_CLAMP: f64 = 1e-6;

/// Entropy-level comparisons (bits).
pub const ENTROPY: f64 = 1e-9;

/// Negative slack beyond this marks a bound violation (bits).
pub const SLACK: f64 = 1e-6;

/// Maximum dimension supported by the dense routines.
pub const MAX_DIM: usize = 64;
