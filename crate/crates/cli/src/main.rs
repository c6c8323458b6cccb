//! `pgplan`: batch driver for the joint power and gas planning model.

mod config;
mod run;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pgplan_core::report::{diff_reports, emit_plot_data, PlanReport};
use pgplan_core::scenario::{build_he_from_bau, sensitivity_grid};
use pgplan_core::synthetic;
use pgplan_core::timegrid::load_duration_diagnostic;
use pgplan_core::{Case, Scenario};
use pgplan_milp::SolveError;
use rayon::prelude::*;

use config::{Config, Data, RepDays};
use run::{Outcome, RunResult};

#[derive(Parser)]
#[command(name = "pgplan", version, about = "Joint power and natural-gas capacity expansion planning")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the synthetic six-state data set and a config pointing at it.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Share of non-power gas load moved to heat pumps in the HE set.
        #[arg(long, default_value_t = 0.5)]
        heating_share: f64,
    },
    /// Build, solve, audit and report one scenario.
    Run(Common),
    /// Write the model MPS without solving.
    Build(Common),
    /// Run every case x zeta combination and write combined diff tables.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "C1,C2,C3")]
        cases: Vec<Case>,
        #[arg(long, value_delimiter = ',', default_value = "0.80,0.85,0.90,0.95")]
        zetas: Vec<f64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the NG price x LCDF price grid.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2,4,5.45,8,10,15")]
        ng: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "10,15,20,25,30,35,40")]
        lcdf: Vec<f64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Select representative days and write the load-duration comparison.
    Repdays(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    case: Option<Case>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Demand set name from the config.
    #[arg(long)]
    demand: Option<String>,
    /// Number of representative days, or a repdays.csv path.
    #[arg(long)]
    repdays: Option<RepDays>,
    #[arg(long)]
    mipgap: Option<f64>,
    /// `highs` (in-process), `cbc` or `highs-cli`; PGPLAN_SOLVER overrides the executable path.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Loaded {
    cfg: Config,
    data: Data,
    base: Scenario,
    out: PathBuf,
    solver: String,
}

impl Common {
    fn load(&self) -> Result<Loaded> {
        let cfg = Config::load(&self.config)?;
        let mut base = cfg.scenario.clone();
        if let Some(c) = self.case {
            base.apply_case(c);
        }
        if let Some(z) = self.zeta {
            base.zeta = z;
        }
        if let Some(d) = &self.demand {
            base.demand = d.clone();
        }
        if let Some(g) = self.mipgap {
            base.mip_gap = g;
        }
        let data = Data::load(&cfg, Some(&base.demand))?;
        let out = self
            .out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        let solver = self
            .solver
            .clone()
            .or_else(|| cfg.solver.clone())
            .unwrap_or_else(|| "highs".into());
        run::make_solver(&solver, base.mip_gap, None)?;
        Ok(Loaded {
            cfg,
            data,
            base,
            out,
            solver,
        })
    }
}

fn scenario_label(s: &Scenario) -> String {
    format!("{}-{}-z{:.2}", s.case, s.demand, s.zeta)
}

fn generate(out: &Path, seed: u64, heating_share: f64) -> Result<()> {
    let system = synthetic::new_england_system();
    let bau = synthetic::synthetic_demand(&system, synthetic::NE_ELEC_MWH, synthetic::NE_GAS_MMBTU, seed);
    let (delta, share) = synthetic::heating_electrification(&system, &bau, heating_share);
    let he = build_he_from_bau(&bau, &delta, &share)?;
    system.write(&out.join("system"))?;
    bau.write(&out.join("demand/BAU"))?;
    he.demand.write(&out.join("demand/HE"))?;
    let cfg = Config {
        system: "system".into(),
        demand: BTreeMap::from([
            ("BAU".to_string(), PathBuf::from("demand/BAU")),
            ("HE".to_string(), PathBuf::from("demand/HE")),
        ]),
        repdays: None,
        scenario: Scenario {
            seed,
            ..Scenario::default()
        },
        solver: None,
        workers: None,
        out: Some("out".into()),
    };
    std::fs::write(out.join("config.json"), serde_json::to_string_pretty(&cfg)?)?;
    println!(
        "wrote {} (BAU {:.3e} MWh / {:.3e} MMBtu, HE {:.3e} MWh / {:.3e} MMBtu)",
        out.display(),
        he.bau.elec_mwh,
        he.bau.gas_mmbtu,
        he.he.elec_mwh,
        he.he.gas_mmbtu
    );
    Ok(())
}

fn print_result(r: &RunResult) {
    let obj = r
        .report
        .as_ref()
        .and_then(|p| p.get("costs", "total"))
        .map_or("-".to_string(), |v| format!("{v:.6e}"));
    println!("{:<24} {:?} total={} {}", r.scenario.name, r.outcome, obj, r.dir.display());
}

/// Runs scenarios on a pool of `workers` threads; each run gets its own model and solver.
fn run_many(l: &Loaded, common: &Common, scenarios: Vec<Scenario>, workers: Option<usize>) -> Result<Vec<RunResult>> {
    let workers = workers
        .or(l.cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let threads = (workers > 1).then_some(1);
    let results: Vec<Result<RunResult>> = pool.install(|| {
        scenarios
            .into_par_iter()
            .map(|s| run::run_scenario(&l.data, s, common.repdays.as_ref(), &l.solver, threads, &l.out))
            .collect()
    });
    results.into_iter().collect()
}

fn exit_for(results: &[RunResult]) -> i32 {
    results.iter().map(|r| r.outcome).max().unwrap_or(Outcome::Ok).code()
}

fn reports(results: &[RunResult]) -> Vec<PlanReport> {
    results.iter().filter_map(|r| r.report.clone()).collect()
}

fn sweep(common: &Common, cases: &[Case], zetas: &[f64], workers: Option<usize>) -> Result<i32> {
    let l = common.load()?;
    let mut scenarios = Vec::new();
    for &z in zetas {
        for &c in cases {
            let mut s = l.base.clone();
            s.apply_case(c);
            s.zeta = z;
            s.name = scenario_label(&s);
            scenarios.push(s);
        }
    }
    let results = run_many(&l, common, scenarios, workers)?;
    results.iter().for_each(print_result);
    let dir = l.out.join("sweep");
    emit_plot_data(&reports(&results), &dir)?;
    // each case against the first listed case at the same zeta
    let mut diffs = Vec::new();
    for chunk in results.chunks(cases.len()) {
        let Some(first) = chunk[0].report.as_ref() else { continue };
        for r in &chunk[1..] {
            if let Some(rep) = &r.report {
                diffs.push(diff_reports(first, rep));
            }
        }
    }
    emit_plot_data(&diffs, &dir.join("diff"))?;
    println!("combined tables in {}", dir.display());
    Ok(exit_for(&results))
}

fn sensitivity(common: &Common, ng: &[f64], lcdf: &[f64], workers: Option<usize>) -> Result<i32> {
    let l = common.load()?;
    let mut base = l.base.clone();
    base.name = scenario_label(&base);
    let scenarios = sensitivity_grid(&base, ng, lcdf)?;
    let results = run_many(&l, common, scenarios, workers)?;
    results.iter().for_each(print_result);
    let dir = l.out.join("sensitivity");
    emit_plot_data(&reports(&results), &dir)?;
    println!("grid tables in {}", dir.display());
    Ok(exit_for(&results))
}

fn repdays(common: &Common) -> Result<i32> {
    let l = common.load()?;
    let mut s = l.base.clone();
    let grid = l.data.grid_for(&mut s, common.repdays.as_ref())?;
    let d = l.data.demand_for(&s)?;
    let diag = load_duration_diagnostic(&grid, &d.elec);
    std::fs::create_dir_all(&l.out)?;
    grid.write_repdays(&l.out.join("repdays.csv"))?;
    diag.write_csv(&l.out.join("ldc.csv"))?;
    println!(
        "{} representative days; load-duration gap max {:.1} MW, mean {:.1} MW",
        grid.num_rep(),
        diag.max_abs_gap,
        diag.mean_abs_gap
    );
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Generate { out, seed, heating_share } => {
            generate(&out, seed, heating_share)?;
            Ok(0)
        }
        Cmd::Run(common) => {
            let l = common.load()?;
            let mut s = l.base.clone();
            s.name = scenario_label(&s);
            let r = run::run_scenario(&l.data, s, common.repdays.as_ref(), &l.solver, None, &l.out)?;
            print_result(&r);
            Ok(r.outcome.code())
        }
        Cmd::Build(common) => {
            let l = common.load()?;
            let mut s = l.base.clone();
            s.name = scenario_label(&s);
            let dir = run::build_only(&l.data, s, common.repdays.as_ref(), &l.out)?;
            println!("{}", dir.join("model.mps").display());
            Ok(0)
        }
        Cmd::Sweep { common, cases, zetas, workers } => sweep(&common, &cases, &zetas, workers),
        Cmd::Sensitivity { common, ng, lcdf, workers } => sensitivity(&common, &ng, &lcdf, workers),
        Cmd::Repdays(common) => repdays(&common),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let missing = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<SolveError>(), Some(SolveError::SolverNotFound(_))));
            ExitCode::from(if missing { run::EXIT_SOLVER_MISSING as u8 } else { 1 })
        }
    }
}
