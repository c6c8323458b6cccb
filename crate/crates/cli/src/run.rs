use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pgplan_core::audit::audit_solution;
use pgplan_core::build::{build_model, ModelInput};
use pgplan_core::report::{build_report, emit_plot_data, PlanReport};
use pgplan_core::Scenario;
use pgplan_milp::mps::write_mps;
use pgplan_milp::{ExternalSolver, HighsSolver, SolveStatus, SolverAdapter};
use serde::Serialize;

use crate::config::{Data, RepDays};

/// Process exit codes.
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;
pub const EXIT_SOLVER_MISSING: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Infeasible,
    AuditFailed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Infeasible => EXIT_INFEASIBLE,
            Outcome::AuditFailed => EXIT_AUDIT,
        }
    }
}

pub fn make_solver(spec: &str, mip_gap: f64, threads: Option<u32>) -> Result<Box<dyn SolverAdapter>> {
    Ok(match spec {
        "highs" => Box::new(HighsSolver {
            mip_gap,
            threads,
            ..HighsSolver::default()
        }),
        "cbc" => Box::new(ExternalSolver::cbc(ExternalSolver::program_from_env("cbc"), mip_gap)),
        "highs-cli" => Box::new(ExternalSolver::highs_cli(
            ExternalSolver::program_from_env("highs"),
            mip_gap,
        )),
        other => bail!("unknown solver `{other}` (expected highs, cbc or highs-cli)"),
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    hash: String,
    status: &'a str,
    objective: Option<f64>,
    mip_gap: Option<f64>,
    solve_seconds: f64,
    columns: usize,
    rows: usize,
    integers: usize,
    audit_passed: Option<bool>,
    outcome: Outcome,
}

pub struct RunResult {
    pub scenario: Scenario,
    pub dir: PathBuf,
    pub outcome: Outcome,
    pub report: Option<PlanReport>,
}

/// Writes the MPS for a scenario without solving; returns the run directory.
pub fn build_only(data: &Data, mut s: Scenario, repdays: Option<&RepDays>, out: &Path) -> Result<PathBuf> {
    s.validate()?;
    let grid = data.grid_for(&mut s, repdays)?;
    let input = ModelInput {
        system: &data.system,
        grid: &grid,
        demand: data.demand_for(&s)?,
        scenario: &s,
    };
    let model = build_model(input)?;
    let dir = out.join(s.short_hash());
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("scenario.json"), s.to_json())?;
    grid.write_repdays(&dir.join("repdays.csv"))?;
    write_mps(&model, BufWriter::new(File::create(dir.join("model.mps"))?))?;
    log::info!(
        "{}: {} columns, {} rows, {} integers",
        s.name,
        model.num_vars(),
        model.num_constraints(),
        model.num_integer_vars()
    );
    Ok(dir)
}

/// Build, solve, audit and report one scenario into `out/<hash>/`.
pub fn run_scenario(
    data: &Data,
    mut s: Scenario,
    repdays: Option<&RepDays>,
    solver: &str,
    threads: Option<u32>,
    out: &Path,
) -> Result<RunResult> {
    s.validate()?;
    let grid = data.grid_for(&mut s, repdays)?;
    let demand = data.demand_for(&s)?;
    let input = ModelInput {
        system: &data.system,
        grid: &grid,
        demand,
        scenario: &s,
    };
    let model = build_model(input)?;
    let hash = s.short_hash();
    let dir = out.join(&hash);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("scenario.json"), s.to_json())?;
    grid.write_repdays(&dir.join("repdays.csv"))?;
    write_mps(&model, BufWriter::new(File::create(dir.join("model.mps"))?))?;

    log::info!("{}: solving {} columns x {} rows", s.name, model.num_vars(), model.num_constraints());
    let sol = make_solver(solver, s.mip_gap, threads)?.solve(&model)?;
    log::info!("{}: {} in {:.1}s", s.name, sol.status, sol.solve_seconds);

    let mut audit_passed = None;
    let mut report = None;
    let outcome = match sol.status {
        SolveStatus::Infeasible | SolveStatus::Unbounded => Outcome::Infeasible,
        SolveStatus::Error => bail!("{}: solver reported an error", s.name),
        SolveStatus::Optimal | SolveStatus::FeasibleGap => {
            sol.write_native(&model, BufWriter::new(File::create(dir.join("solution.sol"))?))?;
            let audit = audit_solution(input, &sol)?;
            std::fs::write(dir.join("audit.json"), audit.to_json())?;
            audit_passed = Some(audit.passed);
            let rep = build_report(input, &sol)?;
            emit_plot_data(std::slice::from_ref(&rep), &dir)?;
            report = Some(rep);
            if audit.passed {
                Outcome::Ok
            } else {
                log::error!("{}: audit failed with {} violations", s.name, audit.violations.len());
                Outcome::AuditFailed
            }
        }
    };
    let summary = Summary {
        scenario: &s.name,
        hash: s.hash(),
        status: sol.status.as_str(),
        objective: sol.objective,
        mip_gap: sol.mip_gap,
        solve_seconds: sol.solve_seconds,
        columns: model.num_vars(),
        rows: model.num_constraints(),
        integers: model.num_integer_vars(),
        audit_passed,
        outcome,
    };
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(RunResult {
        scenario: s,
        dir,
        outcome,
        report,
    })
}
