use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tensor shape: {0}")]
    InvalidShape(String),

    #[error("invalid row index {coords:?} for r = {r}")]
    InvalidRow { coords: Vec<usize>, r: usize },

    #[error("r = {r} exceeds the smallest dimension {min_dim}")]
    RankExceedsDims { r: usize, min_dim: usize },

    #[error("too few columns: {cols} columns < {rows} rows")]
    TooFewColumns { rows: usize, cols: usize },

    #[error("orbit of {0:?} is already crossed")]
    OrbitCrossed(Vec<usize>),

    #[error("blocks share direction {0}")]
    SameDirection(usize),

    #[error("invalid slot set: {0}")]
    InvalidSlots(String),

    /// The crossing procedure could not continue. Under the counting
    /// preconditions this cannot happen, so it always indicates a bug.
    #[error("crossing-out got stuck: {0}")]
    Stuck(String),

    #[error("script step {index}: {source}")]
    Script {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("variable {0} has no value in the assignment")]
    MissingVariable(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
