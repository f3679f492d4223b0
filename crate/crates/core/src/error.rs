//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the analytic and sampling layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature stopped before meeting its tolerance.
    #[error("quadrature stopped at estimated error {achieved:e} (requested {requested:e})")]
    Quadrature { requested: f64, achieved: f64 },
    /// A quantity could not be evaluated in floating point.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
