//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while constructing or differentiating signals.
#[derive(Debug, Error)]
pub enum SignalError {
    #[error("signal dimension must be positive")]
    ZeroDim,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("difference step must be non-zero")]
    ZeroStep,
    #[error("running-mean width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("lacunary truncation order {0} outside supported range 2..=24")]
    LacunaryOrder(u32),
    #[error("signal has no generator-level derivative ({0})")]
    NotDifferentiable(&'static str),
    #[error("empty signal list")]
    EmptyList,
    #[error("matrix block is {rows}x{cols} but signal dimension is {dim}")]
    MatrixShape { rows: usize, cols: usize, dim: usize },
    #[error("config error: {0}")]
    Config(String),
}

/// Errors raised by the scan engine.
#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan range is empty: [{0}, {1}]")]
    EmptyRange(f64, f64),
    #[error("probe set is empty")]
    EmptyProbes,
    #[error("probe window invalid: {0}")]
    BadWindow(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("scan step must be positive, got {0}")]
    BadStep(f64),
    #[error("epsilon must be positive, got {0}")]
    BadEps(f64),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Errors raised by the system solvers.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("system invalid: {0}")]
    BadSystem(String),
    #[error("spectrum not hyperbolic: eigenvalue {re}+{im}i within {floor} of the imaginary axis")]
    NonHyperbolic { re: f64, im: f64, floor: f64 },
    #[error("forcing unbounded on the solve interval: sampled sup {0:.3e} exceeds guard")]
    UnboundedForcing(f64),
    #[error("forcing dimension {got} does not match system block dimension {expected}")]
    ForcingDim { got: usize, expected: usize },
    #[error("initial data has {got} rows, expected {expected}")]
    InitShape { got: usize, expected: usize },
    #[error("requested derivative order {got} exceeds stored stack {stored}")]
    DerivativeOrder { got: usize, stored: usize },
    #[error("solver step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Scan(#[from] ScanError),
}
