use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid parameters or an ill-formed specification.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation
    /// (e.g. a spectral parameter on the real axis).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller violated a stated precondition (e.g. a non-Hermitian matrix
    /// passed to the eigensolver).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative or quadrature routine failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A Monte Carlo experiment aborted too many samples to be trusted.
    #[error("experiment error: {0}")]
    Experiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn experiment(msg: impl Into<String>) -> Self {
        Error::Experiment(msg.into())
    }
}
