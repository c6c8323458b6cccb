use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("unknown reference `{id}` in {context}")]
    MissingReference { id: String, context: String },
    #[error("non-positive capacity for {0}")]
    NonPositiveCapacity(String),
    #[error("{file} row {row}: {msg}")]
    SchemaViolation {
        file: String,
        row: u64,
        msg: String,
    },
    #[error("discount rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum TimeGridError {
    #[error("cannot pick {k} representative days from {distinct} distinct days")]
    DegenerateInput { k: usize, distinct: usize },
    #[error("invalid time grid: {0}")]
    Invalid(String),
    #[error("{file} row {row}: {msg}")]
    SchemaViolation {
        file: String,
        row: u64,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("heating share or delta gives a negative result at {node} index {index}")]
    NegativeResult { node: String, index: usize },
    #[error("price grid is empty")]
    EmptyGrid,
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("{file} row {row}: {msg}")]
    SchemaViolation {
        file: String,
        row: u64,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("missing demand data: {0}")]
    MissingData(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] pgplan_milp::MilpError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("solution has no value for `{0}`")]
    MissingVariable(String),
    #[error("integer grid has {0} combinations (limit 10000)")]
    GridTooLarge(u128),
    #[error("integer variable `{0}` has an infinite bound")]
    UnboundedInteger(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] pgplan_milp::SolveError),
}

macro_rules! impl_io_from {
    ($t:ty) => {
        impl From<(PathBuf, std::io::Error)> for $t {
            fn from((path, source): (PathBuf, std::io::Error)) -> Self {
                Self::Io { path, source }
            }
        }
    };
}

impl_io_from!(TopologyError);
impl_io_from!(TimeGridError);
impl_io_from!(ScenarioError);
