use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    /// A size that must be `2^k` is not.
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    /// Inversion of a singular matrix was requested.
    #[error("matrix is singular over GF(2)")]
    Singular,
    /// A square matrix was required.
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare {
        /// Row count.
        rows: usize,
        /// Column count.
        cols: usize,
    },
    /// A vector has the wrong length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch {
        /// Required length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// A frozen source position holds a non-zero bit.
    #[error("frozen position {0} does not hold its frozen value")]
    FrozenViolation(usize),
    /// An index lies outside its valid range.
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange {
        /// Offending index.
        index: usize,
        /// Size of the indexed range.
        size: usize,
    },
    /// A parameter lies outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    /// WER prediction needs per-channel error probabilities.
    #[error("profile carries no error probabilities")]
    MissingErrorProbabilities,
    /// Mean/variance of an empty profile.
    #[error("empty profile")]
    EmptyProfile,
    /// Linear composition was requested for a table-labeled partition.
    #[error("operand is not a linear partition")]
    NonlinearPartition,
    /// The configuration is well-formed but not supported.
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),
    /// An iterative numerical routine failed.
    #[error("numerical failure: {0}")]
    Numeric(&'static str),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
