use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Values are carried as `f64` regardless of the scalar the computation ran
/// in, so the error type stays non-generic.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("Gram matrix is not numerically positive definite: pivot {pivot:e} at index {index}")]
    Conditioning { pivot: f64, index: usize },

    #[error("truncation error bound {bound:e} exceeds admissible {limit:e} for the Gram solve")]
    Truncation { bound: f64, limit: f64 },

    #[error("no extremal function detected: norm estimate {norm} is not above 2 + {margin:e}")]
    NoExtremal { norm: f64, margin: f64 },

    #[error("no convergence below size cap {cap}: last bracket [{lower}, {upper}]")]
    NonConvergence { cap: usize, lower: f64, upper: f64 },

    #[error("root finder did not converge after {iterations} sweeps (max residual {max_residual:e})")]
    RootsNotConverged {
        iterations: usize,
        max_residual: f64,
        /// Best iterate as (re, im) pairs.
        best: Vec<(f64, f64)>,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
