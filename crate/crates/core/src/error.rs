use thiserror::Error;

/// Errors raised by samplers, solvers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("eigensolver failed to converge for n = {n} (seed {seed}, sample {sample_index})")]
    EigenNonConvergence {
        n: usize,
        seed: u64,
        sample_index: u64,
    },

    #[error("covariance is not positive semidefinite: pivot {pivot} has diagonal {value:e} (tolerance {tolerance:e})")]
    NotPositiveSemidefinite {
        pivot: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("grid decay check failed: |f| at the boundary is {boundary:e} of max|f| (limit {limit:e})")]
    DecayCheck { boundary: f64, limit: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e}: estimated error {estimate:e}")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("series truncation: {0}")]
    Truncation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(arg: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        arg,
        reason: reason.into(),
    }
}
