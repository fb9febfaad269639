use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),
    #[error("arc {0} is not a trip, pickup or delivery arc")]
    NotWorkArc(usize),
    #[error("flow does not decompose: {0}")]
    Decomposition(String),
    #[error("assignment violates row {0}")]
    InfeasibleAssignment(String),
    #[error("plan does not fit the graph: {0}")]
    PlanMismatch(String),
    #[error("request subset of size {0} is out of range")]
    SubsetSize(usize),
    #[error("unknown request index {0}")]
    UnknownRequest(usize),
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("LP format error at line {line}: {msg}")]
    LpFormat { line: usize, msg: String },
    #[error("solution line {line}: {msg}")]
    SolutionFormat { line: usize, msg: String },
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("generator: {0}")]
    Generator(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
