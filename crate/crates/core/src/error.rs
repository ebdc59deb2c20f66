use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Checks record these as a failed report with the error text as its cause;
/// the CLI maps [`Error::Param`] to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("statistics: {0}")]
    Statistics(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank: {0}")]
    Rank(String),
    #[error("parameter: {0}")]
    Param(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain;
