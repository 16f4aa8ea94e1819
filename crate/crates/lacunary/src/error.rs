//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by any of the computation modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested computation exceeds a configured work bound.
    /// The message names the bound so callers can raise it deliberately.
    #[error("resource limit: {what} requires {requested} units, bound is {bound}")]
    ResourceLimit {
        what: String,
        requested: u128,
        bound: u128,
    },

    /// A numeric evaluation produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Value out of the representable range (e.g. Bessel overflow).
    #[error("range error: {0}")]
    Range(String),

    /// An iterative scheme failed to converge within its iteration budget.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// A grid-doubling accuracy check failed even after escalation.
    #[error("accuracy check failed: coarse {coarse:e} vs fine {fine:e}")]
    Accuracy { coarse: f64, fine: f64 },

    /// Two internal routes to the same quantity disagree. This signals a
    /// bug in the counting machinery and is never silently ignored.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    /// A mathematically guaranteed inequality failed at evaluation time.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 invalid arguments, 3 resource
    /// limits, 4 internal consistency, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::ResourceLimit { .. } => 3,
            Error::InternalConsistency(_) => 4,
            _ => 1,
        }
    }
}
