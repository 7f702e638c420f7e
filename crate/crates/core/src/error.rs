use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CqecError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("integration failed at t = {t_reached:.6e}: {reason}")]
    Integration { t_reached: f64, reason: String },
    #[error("class reduction invalid: {0}")]
    ReductionInvalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("fit unreliable: {0}")]
    FitUnreliable(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, CqecError>;
