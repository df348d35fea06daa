use thiserror::Error;

/// Errors raised by problem construction, solvers and diagnostics.
///
/// Numeric payloads are carried as `f64` so the error type stays independent
/// of the scalar type a computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("oracle `{oracle}` returned a non-finite value at coordinate {coordinate}")]
    OracleFailure { oracle: &'static str, coordinate: usize },

    #[error("iterate left the operating region at t={t}: coordinate {coordinate} = {value}")]
    RegionViolation { t: usize, coordinate: usize, value: f64 },

    #[error("non-finite iterate at t={t}")]
    NonFinite { t: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("insufficient data: {usable} usable points, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("instance generation failed after {attempts} attempts")]
    Generation { attempts: usize },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
