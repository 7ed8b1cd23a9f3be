use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index} of {what}")]
    NonFinite { what: &'static str, index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("compatibility condition violated: |phi(0) - f(0)| = {mismatch:.3e} exceeds {tolerance:.3e}")]
    Compatibility { mismatch: f64, tolerance: f64 },

    #[error(
        "trace condition violated: f(0) = {value:.3e} is not zero (limit {limit:.3e}); \
         the fractional derivative needs data with vanishing trace at t = 0"
    )]
    NonZeroTrace { value: f64, limit: f64 },

    #[error("time {t} is beyond the wraparound-safe horizon {horizon} of the periodic box")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("Picard iteration did not converge in window starting at t = {window_start} after {iterations} iterations (last update {last:.3e})")]
    NonConvergence {
        window_start: f64,
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
