use thiserror::Error;

/// Errors raised by bit-string primitives, parameter construction and referees.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("malformed record: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn violation(msg: impl Into<String>) -> Error {
    Error::ProtocolViolation(msg.into())
}
