use thiserror::Error;

/// Errors raised while assembling operators, building plans or solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("index {index} out of range 1..={len} in direction {direction}")]
    IndexOutOfRange {
        direction: usize,
        index: usize,
        len: usize,
    },

    #[error("unsupported boundary configuration: {0}")]
    UnsupportedBoundary(String),

    #[error("singular tridiagonal block {block}: pivot {pivot:e} at row {row} below threshold {threshold:e}")]
    SingularBlock {
        block: usize,
        row: usize,
        pivot: f64,
        threshold: f64,
        /// Outer block index when the failure happened inside a 3D inner solve.
        outer: Option<usize>,
    },

    #[error("eigenvector {index} has quasi-null T-norm {norm:e}")]
    NormalizationFailure { index: usize, norm: f64 },

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("degenerate circulant mass eigenvalue at mode {mode}: |{value:e}|")]
    DegenerateMass { mode: usize, value: f64 },

    #[error("problem size {size} exceeds oracle limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("dense matrix is numerically singular (min |pivot| / max |pivot| = {ratio:e})")]
    SingularMatrix { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
