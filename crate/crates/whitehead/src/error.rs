use thiserror::Error;

/// Errors raised by the library. Each variant maps to a distinct CLI exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported tower: {0}")]
    Unsupported(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("undecided: {0}")]
    Undecided(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(msg.into()))
}
