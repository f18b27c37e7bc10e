use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {re} + {im}i lies on the branch cut of the principal square root")]
    BranchCut { re: f64, im: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point is not strictly inside the forward cone (tau = {tau}, |xi| = {xi_norm})")]
    OutsideCone { tau: f64, xi_norm: f64 },

    #[error("quadrature budget exceeded: {0}")]
    Budget(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
