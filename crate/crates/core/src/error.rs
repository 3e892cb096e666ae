use std::path::PathBuf;

use thiserror::Error;

/// Failures reported by the linear algebra kernels, the solver phases and the file formats.
#[derive(Debug, Error)]
pub enum GpcgError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index set is not strictly increasing at position {position}")]
    UnsortedIndexSet { position: usize },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) has no matching transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("inconsistent bounds at index {index}: lower {lower} > upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("point is infeasible at index {index}")]
    Infeasible { index: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("projected gradient is zero; point is already stationary")]
    AlreadyStationary,

    #[error("curvature {curvature:e} along search direction is not positive; matrix is not positive definite")]
    NotConvex { curvature: f64 },

    #[error("projected search found no acceptable step after {halvings} halvings")]
    SearchFailed { halvings: usize },

    #[error("no free variables at the current iterate")]
    NoFreeVariables,

    #[error("degenerate iterate: no free variables and gradient projection made no progress")]
    Degenerate,

    #[error("conjugate gradient breakdown: p'Ap = {curvature:e}")]
    Breakdown { curvature: f64 },

    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },

    #[error("no KKT point found by enumeration")]
    NoKktPoint,

    #[error("problem too large for enumeration: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error in {path:?} line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest error in {path:?}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = GpcgError> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(GpcgError::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
