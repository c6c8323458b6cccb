use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("non-finite coefficient in `{0}`")]
    NonFiniteCoefficient(String),
    #[error("invalid name `{0}` (must be non-empty and contain no whitespace)")]
    InvalidName(String),
    #[error("invalid bounds for `{name}`: [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("MPS parse error at line {line}: {msg}")]
    Mps { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver executable not found: {0}")]
    SolverNotFound(PathBuf),
    #[error("solver exited with {status}: {stderr}")]
    SolverCrash { status: String, stderr: String },
    #[error("cannot parse solution file at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("solver backend error: {0}")]
    Backend(String),
    #[error(transparent)]
    Model(#[from] MilpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
