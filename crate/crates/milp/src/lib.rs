//! Solver-agnostic MILP modelling layer.

mod error;
mod model;
pub mod mps;
mod solution;
pub mod solver;

pub use error::{MilpError, SolveError};
pub use model::{ConId, Constraint, LinExpr, MilpModel, Sense, VarId, VarKind, Variable};
pub use solution::{parse_cbc, parse_highs, parse_native, Solution, SolveStatus};
pub use solver::{ExternalSolver, HighsSolver, SolutionFormat, SolverAdapter};
