//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The closed-form propagator is only valid for the engineered coupling
    /// profile; anything else must go through the matrix-exponential engine.
    #[error("closed-form evolution requires engineered couplings: {0}")]
    NonEngineeredCouplings(String),

    /// A state has weight outside the subspace an operation is defined on.
    #[error("state not supported on the required subspace: {0}")]
    UnsupportedState(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("master-equation integration failed to converge: {0}")]
    ConvergenceFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
