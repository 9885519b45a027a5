use thiserror::Error;

/// Failures raised by the library.
///
/// The variants split into caller mistakes (everything except
/// [`Error::Internal`]) and internal-consistency failures, which indicate a
/// bug: two independent computations of the same quantity disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inexact division")]
    InexactDivision,

    #[error("valuation of zero undefined: {0}")]
    ValuationOfZero(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
