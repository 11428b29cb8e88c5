use thiserror::Error;

/// Errors raised by constructors, computations and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative transition probability: {0}")]
    NegativeProbability(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("bound violated at t = {t}: {detail}")]
    BoundViolation { t: usize, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
