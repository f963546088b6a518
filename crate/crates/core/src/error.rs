use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// A basis failed the orthogonality/completeness checks.
    #[error("basis validation failed for `{label}`: worst pair ({alpha}, {beta}) residual {residual:e}, completeness residual {completeness:e}")]
    Validation {
        label: String,
        alpha: usize,
        beta: usize,
        residual: f64,
        completeness: f64,
    },

    /// A quantity that must be real carried an imaginary part.
    #[error("numerical integrity: {0}")]
    NumericalIntegrity(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
