use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A merge sequence that does not describe a binary hierarchy.
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry {index} of a level indicator is {value}, expected 0 or 1")]
    NonBinaryEntry { index: usize, value: u8 },

    #[error("negative similarity {value} at ({row}, {col})")]
    NegativeSimilarity { row: usize, col: usize, value: f64 },

    #[error("invalid similarity matrix: {0}")]
    InvalidSimilarity(String),

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("at least two points are required, got n = {0}")]
    TooFewPoints(usize),

    /// A computed quantity contradicts a proven identity, e.g. an LP value
    /// above the norm constant.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("numerical failure in the LP solver: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
