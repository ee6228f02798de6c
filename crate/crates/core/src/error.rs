use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fields are sampled on different grids")]
    GridMismatch,
    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("gradient of the norm is undefined at the zero field")]
    UndefinedGradient,
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("invalid shift: {0}")]
    InvalidShift(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
