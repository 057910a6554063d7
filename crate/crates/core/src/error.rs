use thiserror::Error;

/// Errors raised by the matrix, Kronecker and preserver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: shape mismatch, {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{op}: block dims {m}x{n} need a {size}x{size} matrix, got {rows}x{cols}")]
    BlockShape {
        op: &'static str,
        m: usize,
        n: usize,
        size: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix data has {len} entries, expected {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },

    #[error("matrix dimensions must be positive")]
    ZeroDimension,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{op}: matrix is singular")]
    Singular { op: &'static str },

    #[error("principal logarithm: square-root iteration failed after {iterations} iterations")]
    BranchBoundary { iterations: usize },

    #[error("exp(log X) differs from X by {defect:e} (relative)")]
    LogRoundTrip { defect: f64 },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}: malformed matrix file: {message}")]
    Parse { path: String, message: String },

    #[error("map is not {expected} within tolerance {tol:e}")]
    SymmetryClass { expected: &'static str, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
