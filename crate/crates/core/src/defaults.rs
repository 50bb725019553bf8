//! Central numeric defaults.
//!
//! Every tolerance, step and cap used by scans and solvers is pinned here so
//! that experiment provenance blocks can cite one source of truth. Overrides
//! flow through the option structs; nothing below is read from the
//! environment.

/// Absolute tolerance for adaptive quadrature backing running means and
/// indefinite integrals.
pub const QUAD_TOL: f64 = 1e-8;

/// Spacing of cumulative-integral checkpoints. Evaluating an integral signal
/// costs one local quadrature over at most this width.
pub const CHECKPOINT_SPACING: f64 = 1.0;

/// Default τ grid step for almost-period scans.
pub const TAU_STEP: f64 = 1e-2;

/// Default sample step for interval windows.
pub const WINDOW_STEP: f64 = 1e-2;

/// Hard cap on scan ranges generated by the recurrence ladder.
pub const SCAN_RANGE_CAP: f64 = 1e6;

/// A ladder rung passes when the observed gap bound stays below this fraction
/// of the scanned range.
pub const GAP_FRACTION: f64 = 1.0 / 20.0;

/// Number of golden-section iterations used to polish near-miss candidates.
pub const REFINE_ITERS: usize = 48;

/// Tabulated scans are used while the value table stays below this many
/// complex entries (16 bytes each); larger scans fall back to direct
/// evaluation.
pub const TABULATE_LIMIT: usize = 12_000_000;

/// Spectra with an eigenvalue closer than this to the imaginary axis are
/// rejected by the dichotomy solver.
pub const DICHOTOMY_FLOOR: f64 = 1e-3;

/// Target relative mass of the truncated Green-kernel tail.
pub const KERNEL_TAIL_MASS: f64 = 1e-8;

/// Grid step of the bounded-solution and initial-value marches.
pub const MARCH_STEP: f64 = 1e-3;

/// Stride between stored trajectory samples, in march steps. The stored grid
/// step is `MARCH_STEP * STORE_STRIDE`, aligned with the scan lattice.
pub const STORE_STRIDE: usize = 10;

/// ω-grid half-width for the leading-symbol non-degeneracy check.
pub const SYMBOL_OMEGA_RANGE: f64 = 50.0;

/// ω-grid step for the leading-symbol non-degeneracy check.
pub const SYMBOL_OMEGA_STEP: f64 = 1e-2;

/// Sampled sups beyond this value trip the unbounded-forcing guard.
pub const BOUNDEDNESS_GUARD: f64 = 1e6;

/// Slack added to lattice index bounds to absorb floating-point division
/// error when mapping interval endpoints to grid indices.
pub const LATTICE_EPS: f64 = 1e-9;
