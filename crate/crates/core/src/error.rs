use thiserror::Error;

/// Errors raised by engine construction and the machines built on top of it.
///
/// Variants are split between precondition violations (the caller asked for
/// something outside an operation's domain) and internal failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scalar literal `{0}`")]
    ScalarParse(String),

    #[error("a level system needs at least 2 levels, got {0}")]
    TooFewLevels(usize),

    #[error("levels must be sorted ascending")]
    UnsortedLevels,

    #[error("temperature must be strictly positive")]
    NonPositiveTemperature,

    #[error("energy gap must be strictly positive")]
    NonPositiveGap,

    #[error("index {index:?} out of range for dimensions {dims:?}")]
    IndexOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("map is not a bijection on {0} points")]
    NotBijective(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("probability vector is invalid: {0}")]
    InvalidDistribution(String),

    #[error("all probability is concentrated on ground levels")]
    AllGround,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("tie within tolerance between {0} and {1}")]
    Tie(String, String),

    #[error("program uses uninitialized cell {0}")]
    Uninitialized(usize),

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("circuit parse error on line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that signal a caller-side precondition failure rather
    /// than a bug. The CLI maps these to exit status 2.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
