//! Numerical laboratory for recurrent and almost-periodic signals.
//!
//! The crate is organized around four layers:
//!
//! * [`signal`]: immutable, composable vector-valued signals built from exact
//!   generator formulas (trigonometric polynomials, chirps, almost-automorphic
//!   step extensions, lacunary sums) and calculus combinators (translation,
//!   finite difference, running mean, indefinite integral, character
//!   multiplication, stacking).
//! * [`scan`]: the ε-almost-period scan engine with sampled sup distances,
//!   almost-period sets with gap statistics, recurrence ladders, the locally
//!   uniform metric, cover searches and related inclusion checks.
//! * [`neutral`]: constant-coefficient difference-differential systems: the
//!   leading delay symbol and its non-degeneracy check, forward application,
//!   spectra, bounded solutions on the line via exponential-dichotomy Green
//!   kernels, and half-line initial value marches.
//! * [`lab`]: a registry of named, reproducible experiments, each returning a
//!   structured [`lab::Report`] with machine-checked verdicts.
//!
//! All scans and solvers are deterministic: re-running with the same
//! configuration produces bit-identical results regardless of worker count.
//!
//! ```
//! use recurlab::scan::{almost_period_set, ScanOptions};
//! use recurlab::{ProbeWindow, Signal};
//!
//! // Shifts moving sin by at most 0.2 on [−3, 3], scanned over [0, 20]:
//! // clusters at the periods 2πk.
//! let set = almost_period_set(
//!     &Signal::sin(),
//!     0.2,
//!     &ProbeWindow::symmetric(3.0),
//!     (0.0, 20.0),
//!     &ScanOptions::default(),
//! )
//! .unwrap();
//! assert!(set.members.iter().any(|&m| (m - 2.0 * std::f64::consts::PI).abs() < 0.1));
//! assert!(set.max_gap < 2.0 * std::f64::consts::PI + 0.1);
//! ```

// Guards are written `!(x > 0.0)` so NaN configuration values are rejected
// along with non-positive ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod defaults;
pub mod descriptor;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod neutral;
pub mod quad;
pub mod scan;
pub mod sequence;
pub mod signal;
pub mod value;
pub mod window;

pub use descriptor::{SignalSpec, SystemSpec};
pub use error::{ScanError, SignalError, SolveError};
pub use neutral::{NeutralSystem, OdeSystem, Trajectory};
pub use scan::{AlmostPeriodSet, LadderVerdict, ScanOptions};
pub use signal::{AaBranch, Signal};
pub use value::{sup_norm, Value, C64};
pub use window::ProbeWindow;
