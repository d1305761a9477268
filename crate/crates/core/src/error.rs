use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum JuntaError {
    #[error("query budget of {budget} evaluations exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("dimension {n} exceeds the supported limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("index {index} out of range for {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("combinatorial blowup: {count} sets exceed the cap {cap}")]
    CombinatorialBlowup { count: u128, cap: u128 },
    #[error("cutting-plane loop failed after {iterations} iterations")]
    IterationLimitExceeded { iterations: usize },
    #[error("legal cover construction failed for j = {j}, s = {s}")]
    ConstructionFailed { j: usize, s: usize },
    #[error("part count {0} is odd")]
    OddPartCount(usize),
    #[error("point is not constant on part {0}")]
    NonConstantPart(usize),
    #[error("k = {k} exceeds the permutation cap {cap}")]
    KTooLarge { k: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, JuntaError>;

pub(crate) fn invalid(msg: impl Into<String>) -> JuntaError {
    JuntaError::InvalidParameter(msg.into())
}
