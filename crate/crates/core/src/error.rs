use thiserror::Error;

/// Errors raised by the operator toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error(
        "matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e} below {tolerance:.3e})"
    )]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator does not leave the null space of the weight invariant (not in B_A)")]
    NotInBA,

    #[error("weight has rank zero")]
    RankZero,

    #[error("A-numerical radius is unbounded: operator is not in B_A")]
    UnboundedNumericalRadius,

    #[error("block ({row}, {col}) has shape {rows}x{cols}, expected {expected}x{expected}")]
    BlockShapeMismatch {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("unsupported block unitary {kind} for k = {k}")]
    BadKind { kind: String, k: usize },

    #[error("requested rank {rank} outside 0..={dim}")]
    BadRank { dim: usize, rank: usize },

    #[error("unknown profile {0:?}")]
    BadProfile(String),

    #[error("unknown relation {0:?}")]
    UnknownRelation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
