use crate::diag_core::IndexWindow;

/// Errors raised by operator construction, algebra and factorization.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WienerError {
    #[error("block size must be at least 1")]
    InvalidBlockSize,
    #[error("invalid index window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("block size mismatch: {left} vs {right}")]
    BlockSizeMismatch { left: usize, right: usize },
    #[error("diagonal {offset} has {found} blocks, window needs {expected}")]
    DiagonalLength {
        offset: i64,
        expected: usize,
        found: usize,
    },
    #[error("non-finite entry in diagonal {offset} at column {column}")]
    NonFinite { offset: i64, column: i64 },
    #[error("window {window} does not cover the operator window {required}")]
    WindowTooSmall {
        window: IndexWindow,
        required: IndexWindow,
    },
    #[error("operator is not self-adjoint (deviation {deviation:.3e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("operator is not upper triangular (offset {offset} present)")]
    NotUpperTriangular { offset: i64 },
    #[error("|z| = {modulus} is outside the closed unit disk")]
    OutsideDisk { modulus: f64 },
    #[error("operator has lower diagonals, Zadeh transform needs |z| = 1 (got |z| = {modulus})")]
    BilateralOffCircle { modulus: f64 },
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("not positive definite on this window (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("not uniformly positive on window: certificate {certificate:.6e} < {delta:.3e}")]
    NotUniformlyPositive { certificate: f64, delta: f64 },
    #[error("singular diagonal block at index {index}")]
    SingularBlock { index: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("finite sections did not stabilize: gap {gap:.3e} >= tol {tol:.3e}")]
    StabilizationFailure { gap: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, WienerError>;
