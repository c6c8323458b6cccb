//! Solver adapters. The in-process HiGHS backend is the default; any
//! executable that reads free MPS can be driven through [`ExternalSolver`].

use std::collections::HashMap;
use std::io::ErrorKind;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use highs::{ColProblem, HighsModelStatus, Row};

use crate::error::SolveError;
use crate::model::{MilpModel, Sense};
use crate::mps::write_mps;
use crate::solution::{parse_cbc, parse_highs, parse_native, Solution, SolveStatus};

pub trait SolverAdapter: Send + Sync {
    fn solve(&self, model: &MilpModel) -> Result<Solution, SolveError>;
}

/// In-process HiGHS.
#[derive(Debug, Clone)]
pub struct HighsSolver {
    pub mip_gap: f64,
    pub time_limit: Option<Duration>,
    pub threads: Option<u32>,
    pub presolve: bool,
}

impl Default for HighsSolver {
    fn default() -> Self {
        Self {
            mip_gap: 0.01,
            time_limit: None,
            threads: None,
            presolve: true,
        }
    }
}

impl HighsSolver {
    pub fn with_gap(mip_gap: f64) -> Self {
        Self {
            mip_gap,
            ..Self::default()
        }
    }

    fn build(&self, model: &MilpModel) -> ColProblem {
        let mut pb = ColProblem::new();
        let rows: Vec<Row> = model
            .constraints()
            .iter()
            .map(|c| match c.sense {
                Sense::Le => pb.add_row(f64::NEG_INFINITY..=c.rhs),
                Sense::Ge => pb.add_row(c.rhs..=f64::INFINITY),
                Sense::Eq => pb.add_row(c.rhs..=c.rhs),
            })
            .collect();
        let mut cols: Vec<Vec<(Row, f64)>> = vec![Vec::new(); model.num_vars()];
        for (r, c) in model.constraints().iter().enumerate() {
            for &(v, a) in &c.terms {
                cols[v.index()].push((rows[r], a));
            }
        }
        let obj = model.objective_coefficients();
        for (j, (var, entries)) in model.variables().iter().zip(cols).enumerate() {
            pb.add_column_with_integrality(
                obj[j],
                var.lower..=var.upper,
                entries,
                var.kind.is_integral(),
            );
        }
        pb
    }

    fn run(&self, model: &MilpModel, presolve: bool) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let mut hm = self
            .build(model)
            .try_optimise(highs::Sense::Minimise)
            .map_err(|s| SolveError::Backend(format!("model rejected: {s:?}")))?;
        let set = |hm: &mut highs::Model, k: &str, v: f64| {
            hm.try_set_option(k, v)
                .map_err(|e| SolveError::Backend(format!("option {k}: {e:?}")))
        };
        set(&mut hm, "mip_rel_gap", self.mip_gap)?;
        if let Some(t) = self.time_limit {
            set(&mut hm, "time_limit", t.as_secs_f64())?;
        }
        if let Some(n) = self.threads {
            hm.try_set_option("threads", n as i32)
                .map_err(|e| SolveError::Backend(format!("option threads: {e:?}")))?;
        }
        if !presolve {
            hm.try_set_option("presolve", "off")
                .map_err(|e| SolveError::Backend(format!("option presolve: {e:?}")))?;
        }
        let solved = hm
            .try_solve()
            .map_err(|s| SolveError::Backend(format!("run failed: {s:?}")))?;
        let raw = solved.status();
        // SOLUTION_STATUS_FEASIBLE == 2; the typed accessor panics on -1 for empty models
        let has_primal = solved
            .int_info_value(c"primal_solution_status")
            .is_ok_and(|v| v == 2);
        let status = match raw {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::UnboundedOrInfeasible => {
                if presolve {
                    log::debug!("ambiguous status from presolve, re-solving without it");
                    return self.run(model, false);
                }
                SolveStatus::Infeasible
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
                if has_primal =>
            {
                SolveStatus::FeasibleGap
            }
            HighsModelStatus::ReachedTimeLimit | HighsModelStatus::ReachedIterationLimit => {
                SolveStatus::Error
            }
            other => {
                log::warn!("HiGHS returned {other:?}");
                SolveStatus::Error
            }
        };
        let mut sol = Solution::without_values(status);
        sol.solve_seconds = start.elapsed().as_secs_f64();
        if !status.has_solution() {
            return Ok(sol);
        }
        if raw == HighsModelStatus::ModelEmpty {
            let x: Vec<f64> = model
                .variables()
                .iter()
                .map(|v| if v.lower.is_finite() { v.lower } else { 0.0f64.min(v.upper) })
                .collect();
            sol.objective = Some(model.objective_value(&x));
            sol.values = names_to_values(model, &x);
            sol.mip_gap = Some(0.0);
            return Ok(sol);
        }
        let x = solved.get_solution().columns().to_vec();
        sol.objective = Some(solved.objective_value() + model.objective_offset());
        if model.num_integer_vars() > 0 {
            sol.mip_gap = Some(solved.mip_gap());
        }
        sol.values = names_to_values(model, &x);
        Ok(sol)
    }
}

fn names_to_values(model: &MilpModel, x: &[f64]) -> HashMap<String, f64> {
    model
        .variables()
        .iter()
        .zip(x)
        .map(|(v, &x)| (v.name.clone(), x))
        .collect()
}

impl SolverAdapter for HighsSolver {
    fn solve(&self, model: &MilpModel) -> Result<Solution, SolveError> {
        self.run(model, self.presolve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    Native,
    Cbc,
    Highs,
}

/// Runs an external executable on an MPS file. `args` may contain the
/// placeholders `{mps}` and `{sol}`.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub format: SolutionFormat,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>, format: SolutionFormat) -> Self {
        Self {
            program: program.into(),
            args,
            format,
        }
    }

    pub fn cbc(program: impl Into<PathBuf>, mip_gap: f64) -> Self {
        let args = ["{mps}", "ratio", &mip_gap.to_string(), "solve", "solu", "{sol}"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::new(program, args, SolutionFormat::Cbc)
    }

    pub fn highs_cli(program: impl Into<PathBuf>, mip_gap: f64) -> Self {
        let args = vec![
            "--model_file".into(),
            "{mps}".into(),
            "--solution_file".into(),
            "{sol}".into(),
            "--mip_rel_gap".into(),
            mip_gap.to_string(),
        ];
        Self::new(program, args, SolutionFormat::Highs)
    }

    /// Program from `PGPLAN_SOLVER` if set, otherwise `default`.
    pub fn program_from_env(default: &str) -> PathBuf {
        std::env::var_os("PGPLAN_SOLVER")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(default))
    }
}

impl SolverAdapter for ExternalSolver {
    fn solve(&self, model: &MilpModel) -> Result<Solution, SolveError> {
        let dir = tempfile::tempdir()?;
        let mps = dir.path().join("model.mps");
        let sol = dir.path().join("model.sol");
        write_mps(model, std::fs::File::create(&mps)?)?;
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| {
                a.replace("{mps}", &mps.to_string_lossy())
                    .replace("{sol}", &sol.to_string_lossy())
            })
            .collect();
        let start = Instant::now();
        let out = match Command::new(&self.program).args(&args).output() {
            Ok(o) => o,
            Err(e) if e.kind() == ErrorKind::NotFound => {
                return Err(SolveError::SolverNotFound(self.program.clone()))
            }
            Err(e) => return Err(e.into()),
        };
        if !out.status.success() {
            return Err(SolveError::SolverCrash {
                status: out.status.to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
            });
        }
        let text = std::fs::read_to_string(&sol).map_err(|e| SolveError::ParseError {
            line: 0,
            msg: format!("solution file not written: {e}"),
        })?;
        let mut parsed = match self.format {
            SolutionFormat::Native => parse_native(&text)?,
            SolutionFormat::Cbc => parse_cbc(&text)?,
            SolutionFormat::Highs => parse_highs(&text)?,
        };
        parsed.solve_seconds = start.elapsed().as_secs_f64();
        if parsed.status.has_solution() {
            let x = parsed.dense(model).map_err(|name| SolveError::ParseError {
                line: 0,
                msg: format!("no value for variable `{name}`"),
            })?;
            // objective lines in foreign formats omit the MPS offset
            parsed.objective = Some(model.objective_value(&x));
        }
        Ok(parsed)
    }
}
