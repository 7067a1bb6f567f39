use thiserror::Error;

/// Errors produced by `qinv-core`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system shape: {0}")]
    InvalidShape(String),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("letter {letter} out of range 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("point {point} out of range 1..={k}")]
    PointOutOfRange { point: usize, k: usize },

    #[error("malformed cycle: {0}")]
    MalformedCycle(String),

    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("{states} basis states exceed the evaluation budget of {limit}")]
    Budget { states: u128, limit: usize },

    #[error("inconsistent code facts: {0}")]
    Facts(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid stabilizer structure: {0}")]
    Structure(String),

    #[error("operator is not a projector (|P^2 - P|_max = {0:e})")]
    NotProjector(f64),

    #[error("subgroup closure exceeded {limit} elements")]
    SubgroupTooLarge { limit: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("rewrite did not terminate within {0} steps")]
    StepBudget(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
