use thiserror::Error;

use crate::runtime::Party;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("qubit label `{0}` is already in use")]
    DuplicateLabel(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("density operator trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("density operator has negative eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("{party} does not own qubit `{label}`")]
    Ownership { party: Party, label: String },

    #[error("no unused Bell pair ends at qubit `{0}`")]
    MissingBellPair(String),

    #[error("payload {value} does not fit in {bits} bits")]
    PayloadTooWide { bits: u32, value: u64 },

    #[error("state does not factor across the requested split (residual {residual:e})")]
    NotProduct { residual: f64 },

    #[error("vectors are not orthogonal (overlap modulus {overlap:e})")]
    NotOrthogonal { overlap: f64 },

    #[error("branches disagree on resource usage")]
    LedgerMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),
}
