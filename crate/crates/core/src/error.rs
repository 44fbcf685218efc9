use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("truncated self-delimiting frame: {0}")]
    TruncatedFrame(&'static str),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("string {0} is not certified in this code table")]
    Uncertified(String),
    #[error("series too short: need at least 3 strings, got {0}")]
    TooShort(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
