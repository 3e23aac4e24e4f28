use thiserror::Error;

/// Errors produced by the numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("expected {expected} entries, got {actual}")]
    BadLength { expected: usize, actual: usize },
    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from its mirror by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix is singular (min eigenvalue {min:e}, max eigenvalue {max:e})")]
    SingularMatrix { min: f64, max: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min:e})")]
    NotPositive { min: f64 },
    #[error("operator is zero")]
    ZeroOperator,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("block structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("golden-section scan did not converge within {iters} iterations")]
    NonConvergence { iters: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
