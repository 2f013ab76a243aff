use alloc::string::String;

use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("eigenvalue {eigenvalue} lies on the branch cut ]-inf, 0]")]
    BranchCut { eigenvalue: Complex64 },

    #[error("matrix is singular or too ill-conditioned to invert")]
    Singular,

    #[error("argument {z} is outside the domain: {reason}")]
    Domain { z: Complex64, reason: &'static str },

    #[error("matrix is too ill-conditioned at z = {z} (condition estimate {condition:e})")]
    Conditioning { z: Complex64, condition: f64 },

    #[error("requested accuracy not reached: error estimate {estimate:e} > {requested:e}")]
    Accuracy { estimate: f64, requested: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("result overflows the floating point range")]
    Range,

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
