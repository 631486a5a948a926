use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("relative error undefined: reference channel is identically zero")]
    DegenerateTruth,
    #[error("SNR undefined: clean signal is zero on every retained entry")]
    DegenerateSignal,
    #[error("could not place {clusters} disjoint clusters after {attempts} attempts")]
    PlacementFailure { clusters: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
