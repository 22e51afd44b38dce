use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CslError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("random generation failed: {0}")]
    RandFailure(String),
}

pub type Result<T> = std::result::Result<T, CslError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CslError {
    CslError::InvalidInput(msg.into())
}
