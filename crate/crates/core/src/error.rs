use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid pattern {word:?}: {reason}")]
    InvalidPattern { word: String, reason: String },

    #[error("edges share vertex {0}")]
    Overlap(i64),

    #[error("edge sizes differ: {0} vs {1}")]
    Arity(usize, usize),

    #[error("sign function has {signs} entries but partition has {parts} parts")]
    LengthMismatch { signs: usize, parts: usize },

    #[error("invalid sign function {0:?}")]
    InvalidSignFunction(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("omitting letters from {0} leaves an invalid pattern")]
    InvalidResult(String),

    #[error("invalid ordered partition: {0}")]
    InvalidPartition(String),

    #[error("partitions sum to {0} and {1}")]
    SumMismatch(usize, usize),

    #[error("invalid partition chain: {0}")]
    InvalidChain(String),

    #[error("no budget for pattern {0}")]
    MissingPattern(String),

    #[error("invalid budget table: {0}")]
    InvalidBudget(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("witness does not fit the matching: {0}")]
    InvalidWitness(String),

    #[error("witness is not interval-wise")]
    NotIntervalWise,

    #[error("matching is not r-partite")]
    NotRPartite,

    #[error("uniformity mismatch: expected {expected}, found {found}")]
    UniformityMismatch { expected: usize, found: usize },

    #[error("instance has {edges} edges, above the exact-search limit of {limit}")]
    TooLarge { edges: usize, limit: usize },

    #[error("pattern {0} is not collectable")]
    NotCollectable(String),

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no cap for sign function {0}")]
    MissingSignFunction(String),

    #[error("coordinate overflow")]
    Overflow,

    #[error("partition {0} has no proper refinement")]
    NoRefinement(String),

    #[error("enumeration of {count} matchings exceeds budget {budget}")]
    BudgetExceeded { count: String, budget: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal contract violated: {0}")]
    Contract(String),
}
