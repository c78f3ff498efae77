use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classes of failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A well-formed request whose mathematical preconditions do not hold.
    Domain,
    /// A search or enumeration cap was hit before an answer was found.
    Cap,
    /// Input that could not be parsed or violates a schema.
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("lattice is not {expected}")]
    Definiteness { expected: &'static str },
    #[error("odd p-length {0}: Artin invariant undefined")]
    OddLength(usize),
    #[error("lattice is not {0}-elementary")]
    NotElementary(u32),
    #[error("vector is not a root (norm {0}, expected -2)")]
    NotARoot(BigInt),
    #[error("matrix is not an isometry: {0}")]
    NotIsometry(String),
    #[error("extension is not integral (denominator {0})")]
    NonIntegral(BigInt),
    #[error("subspace is not characteristic")]
    NotCharacteristic,
    #[error("subspace is not strictly characteristic: {0}")]
    NotStrict(String),
    #[error("working field F_{{{p}^{m}}} too small: {reason}")]
    FieldTooSmall { p: u32, m: u32, reason: String },
    #[error("{what} cap of {cap} exceeded")]
    CapExceeded { what: &'static str, cap: u128 },
    #[error("period points belong to different contexts")]
    ContextMismatch,
    #[error("inconsistent catalog: {0}")]
    InconsistentCatalog(String),
    #[error("integer overflow in fixed-width kernel: {0}")]
    Overflow(&'static str),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Malformed(_) => ErrorKind::Malformed,
            Error::CapExceeded { .. } => ErrorKind::Cap,
            _ => ErrorKind::Domain,
        }
    }
}
