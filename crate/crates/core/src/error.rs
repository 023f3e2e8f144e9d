use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("eigenvalue {eigenvalue:.3e} lies outside the domain of the function")]
    DomainError { eigenvalue: f64 },

    #[error("block is singular or ill-conditioned (smallest singular value {smallest_singular_value:.3e}, condition {condition:.3e})")]
    SingularBlock {
        smallest_singular_value: f64,
        condition: f64,
    },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("basis of {size} states exceeds the cap of {cap}")]
    BasisTooLarge { size: u128, cap: usize },

    #[error("cutoff policy mismatch: {0}")]
    PolicyMismatch(&'static str),

    #[error("mode index {index} out of range for {modes} modes")]
    InvalidMode { index: usize, modes: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not strictly positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotStrictlyPositive { min_eigenvalue: f64 },

    #[error("operator is not a state (trace defect {trace_defect:.3e})")]
    NotAState { trace_defect: f64 },

    #[error("empty block selection")]
    EmptySelection,

    #[error("dimensions too small: {0}")]
    DimsTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
