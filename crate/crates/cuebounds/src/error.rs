use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the operation's domain.
    #[error("invalid input: {0}")]
    Domain(String),
    /// A theorem hypothesis does not hold for the requested parameters.
    #[error("not applicable: {0}")]
    Applicability(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn inapplicable<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Applicability(msg.into()))
}
