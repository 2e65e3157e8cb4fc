use thiserror::Error;

/// Errors produced by the interleaver toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("value {value} is outside [0, {modulus})")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("polynomial {0} does not permute Z_{1}")]
    NotBijective(String, u64),

    #[error("sequence is not a bijection on 0..{0}")]
    InvalidPermutation(usize),

    #[error("indices must differ, got ({0}, {0})")]
    SameIndex(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("input must not be empty")]
    EmptyInput,

    #[error("length {length} exceeds the exhaustive enumeration limit of {limit}")]
    TooLarge { length: usize, limit: usize },

    #[error("wu_max differs between spectra: {0} vs {1}")]
    WuMaxMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("resource budget exceeded after {explored} explored nodes")]
    BudgetExceeded { explored: u64 },

    #[error("no candidate survives the spread filter")]
    NoCandidates,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
