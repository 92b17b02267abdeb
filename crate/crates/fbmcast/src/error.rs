//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A covariance/correlation matrix could not be factorized even after
    /// the diagonal jitter escalation ran to its cap.
    #[error(
        "matrix of dimension {dim} (H = {hurst}) is not positive definite; \
         factorization failed even with diagonal jitter {max_jitter:.3e}"
    )]
    Factorization {
        dim: usize,
        hurst: f64,
        max_jitter: f64,
    },

    /// A parameter is outside its legal range.
    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Vector/matrix sizes do not line up.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The logistic trajectory collapsed onto a fixed point.
    #[error("logistic orbit became degenerate at step {step} (value {value})")]
    DegenerateOrbit { step: usize, value: f64 },

    /// Input data carries no usable signal (all zeros, zero denominator, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// Hurst-exponent estimation could not produce a result.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// A series that must be strictly positive (for the log transform) is not.
    #[error("series value at index {index} is {value}; all values must be > 0")]
    NonPositiveData { index: usize, value: f64 },

    /// Detrending windows are too small for a linear fit.
    #[error("window configuration is infeasible: {0}")]
    WindowTooSmall(&'static str),

    /// A root-finding target lies outside the attainable range.
    #[error("target {value} is outside the attainable range [{lo:.6}, {hi:.6}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    /// A pipeline stage failed; identifies the stage and the underlying error.
    #[error("pipeline stage '{stage}' failed: {source}")]
    Pipeline {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Pipeline {
            stage,
            source: Box::new(self),
        }
    }
}
