use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("candidate {0} has not been evaluated")]
    Unevaluated(usize),

    #[error("evaluation budget of {cap} exhausted")]
    BudgetExhausted { cap: u64 },

    #[error("decision {index} value {value} outside its domain")]
    OutOfDomain { index: usize, value: f64 },

    #[error("unknown problem descriptor `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("goal count mismatch: expected {expected}, found {found}")]
    GoalMismatch { expected: usize, found: usize },

    #[error("missing column {0} in row")]
    MissingColumn(usize),

    #[error("unknown column type `{0}`")]
    UnknownColumnType(String),

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("rung {rung}: {source}")]
    Rung {
        rung: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
