use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("malformed rule: {0}")]
    MalformedRule(String),

    #[error("rule not strictly positive")]
    NotStrictlyPositive,

    #[error("context {context:?} does not have q as a stationary distribution")]
    NonStationaryContext { context: Vec<u8> },

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("state space too large: needs {required} weights ({sites} sites), cap is {cap}")]
    CapExceeded { required: u128, sites: usize, cap: u128 },

    #[error("zero marginal at pattern {pattern}")]
    ZeroMarginal { pattern: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
