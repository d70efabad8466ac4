use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence is empty")]
    EmptySequence,
    #[error("element {value} at index {index} is not 0 or 1")]
    NonBinaryElement { index: usize, value: i64 },
    #[error("log_choose({n}, {r}) is out of range: r must not exceed n")]
    OutOfRange { n: u64, r: u64 },
    #[error("stage {stage} is outside 1..={n}")]
    StageOutOfRange { stage: usize, n: usize },
    #[error("invalid trend model: {0}")]
    InvalidModel(String),
    #[error("sequence contains a single symbol; the runs statistic has zero variance")]
    DegenerateSequence,
    #[error("invalid counts: {successes} successes out of {trials} trials")]
    InvalidCounts { trials: u64, successes: u64 },
    #[error("invalid null proportion {0}: must lie in (0, 1)")]
    InvalidProportion(f64),
    #[error("all values are equal; Kendall tau-b is undefined")]
    ConstantValues,
    #[error("{0}")]
    InvalidInput(String),
    #[error("need at least 2 values to rank, got {0}")]
    TooFewValues(usize),
    #[error("sample {0} is empty")]
    EmptySample(char),
    #[error("insufficient data: {0} majority symbols give fewer than 2 gaps")]
    InsufficientData(usize),
    #[error("significance level {0} must lie in (0, 1)")]
    InvalidSignificance(f64),
    #[error("invalid power study: {0}")]
    InvalidStudy(String),
    #[error("power curves do not share the same (n, b) grid")]
    GridMismatch,
}
