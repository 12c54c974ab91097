use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown problem `{name}`; available: {available}")]
    UnknownProblem { name: String, available: String },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("Fischer-Burmeister kink at pair {index}: multiplier and constraint are both zero with mu = 0")]
    Kink { index: usize },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("problem `{0}` has no feasibility annotation")]
    MissingAnnotation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
