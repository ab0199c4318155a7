use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The variants map one-to-one onto the CLI exit codes: usage errors exit
/// with 1, capacity and domain errors with 2, integrity errors with 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument or precondition was violated by the caller.
    #[error("invalid input: {0}")]
    Usage(String),
    /// A value would leave the supported integer range.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// An analytic expression was evaluated outside the region where its
    /// iterated logarithms are positive.
    #[error("out of asymptotic domain: {0}")]
    Domain(String),
    /// A structural guarantee failed to hold (a result that must exist was
    /// not found, or a constructed solution did not verify).
    #[error("integrity violation: {0}")]
    Integrity(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
