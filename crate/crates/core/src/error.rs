use thiserror::Error;

/// Errors raised by the certificate engine and the verification routines.
///
/// `Infeasible` is a signal rather than a fault: it reports that an inequality
/// system has no solution at the requested parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
