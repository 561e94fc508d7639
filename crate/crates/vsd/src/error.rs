//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid argument (mismatched grids, empty inputs, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The iterative linear solver did not reach the requested residual.
    #[error("linear solver did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { iterations: usize, residual: f64 },

    /// A NaN or infinity showed up mid-computation.
    #[error("non-finite value detected: {0}")]
    NonFinite(String),

    /// Configuration file problems, with the offending field path.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
