use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: operator is {expected}×{expected}, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator must be {required}, got {found}")]
    StructureMismatch {
        required: &'static str,
        found: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{process} process already terminated at step {step}")]
    ProcessTerminated { process: &'static str, step: usize },

    #[error(
        "skew validation failed: max|A+Aᵀ| = {asymmetry:e} exceeds {tol:e}·max|A| = {bound:e}"
    )]
    NotSkew {
        asymmetry: f64,
        tol: f64,
        bound: f64,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("matrix is not square: {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dense oracle limited to n ≤ {limit}, got n = {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("Galerkin point undefined at k = {k}: projected matrix is singular")]
    GalerkinUndefined { k: usize },

    #[error("numerical breakdown in {method} at iteration {iter}: {reason}")]
    NumericalBreakdown {
        method: &'static str,
        iter: usize,
        reason: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
