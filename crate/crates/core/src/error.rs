use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A Gaussian-type integral does not converge. `critical_gamma` is the
    /// weight parameter at which integrability is lost.
    #[error("integral diverges: {reason} (critical gamma = {critical_gamma})")]
    Divergence { reason: String, critical_gamma: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
