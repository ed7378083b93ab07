use thiserror::Error;

/// Errors raised by the family, transversal, MIF, ISP, bounds and search
/// operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MifError {
    #[error("family contains the empty block")]
    EmptyBlock,
    #[error("family is empty")]
    EmptyFamily,
    #[error("point {point} is outside the universe of size {universe}")]
    PointOutOfUniverse { point: usize, universe: usize },
    #[error("universe of {requested} points exceeds the limit of {limit}")]
    UniverseOverflow { requested: usize, limit: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("label count {labels} does not match universe size {universe}")]
    LabelCount { labels: usize, universe: usize },
    #[error("brute-force oracle refuses {points} points (limit {limit})")]
    OracleTooLarge { points: usize, limit: usize },
    #[error("family is not a MIF: {0}")]
    NotMif(String),
    #[error("points {alpha} and {beta} lie together in a block")]
    CoveredPair { alpha: usize, beta: usize },
    #[error("alpha and beta are the same point {0}")]
    SamePoint(usize),
    #[error("point {0} is not a point of the family")]
    NotAPoint(usize),
    #[error("family is not intersecting")]
    NotIntersecting,
    #[error("family is not uniform")]
    NotUniform,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("unsupported projective plane order {0}")]
    UnsupportedOrder(usize),
    #[error("invalid set-pair system: {0}")]
    InvalidIsp(String),
    #[error("unsupported block size k={0} for exhaustive search")]
    UnsupportedK(usize),
    #[error("unsupported search parameters: {0}")]
    UnsupportedParams(String),
    #[error("node budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
    /// A proven theorem or internal postcondition failed; always a bug.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, MifError>;

impl From<std::io::Error> for MifError {
    fn from(e: std::io::Error) -> Self {
        MifError::Io(e.to_string())
    }
}

macro_rules! ensure_invariant {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err($crate::error::MifError::InvariantViolation(format!($($arg)*)));
        }
    };
}
pub(crate) use ensure_invariant;
