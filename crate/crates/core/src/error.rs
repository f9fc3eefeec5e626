use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("unsupported type: {0}")]
    UnsupportedType(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("not a diagram automorphism: {0}")]
    NotAutomorphism(String),

    #[error("invalid Q-datum: {0}")]
    InvalidDatum(String),

    #[error("vertex {0} is not a source")]
    NotASource(usize),

    #[error("{0} is not a positive root")]
    NotPositiveRoot(String),

    #[error("window too small: cutoff {have} but {required} is required")]
    Cutoff { have: i64, required: i64 },

    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(usize),

    #[error("Kostant partitions of different weights")]
    WeightMismatch,

    #[error("l-weight is not in the positive cone of the datum: {0}")]
    OutsideCone(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
