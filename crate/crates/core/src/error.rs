use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("point structure mismatch: {0}")]
    Structure(String),

    #[error("category index {index} out of range for variable {variable} ({count} categories)")]
    CategoryIndex {
        variable: usize,
        index: usize,
        count: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown problem `{name}`; available: {}", .available.join(", "))]
    UnknownProblem {
        name: String,
        available: Vec<String>,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("design of experiments produced no point with a finite objective value")]
    NoFiniteDoe,

    #[error("external blackbox: {0}")]
    External(String),

    #[error("trace format: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
