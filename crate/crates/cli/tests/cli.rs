use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pgplan_core::report::{CSV_COLUMNS, TABLES};
use pgplan_core::synthetic::{self, Fixture};

const BIN: &str = env!("CARGO_BIN_EXE_pgplan");

/// Writes a fixture as a data directory plus config; returns the config path.
fn write_case(dir: &Path, f: &Fixture) -> PathBuf {
    f.system.write(&dir.join("system")).unwrap();
    f.demand.write(&dir.join("demand/BAU")).unwrap();
    f.grid.write_repdays(&dir.join("repdays.csv")).unwrap();
    let mut scenario: serde_json::Value = serde_json::from_str(&f.scenario.to_json()).unwrap();
    scenario["mip_gap"] = 1e-9.into();
    let cfg = serde_json::json!({
        "system": "system",
        "demand": { "BAU": "demand/BAU" },
        "repdays": "repdays.csv",
        "scenario": scenario,
        "workers": 2,
        "out": "out",
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

fn pgplan(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("PGPLAN_SOLVER")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn run_dirs(out: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.join("scenario.json").exists())
        .collect();
    v.sort();
    v
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn identical_config_gives_identical_mps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_case(tmp.path(), &synthetic::micro_gas_network());
    let cfg = cfg.to_str().unwrap();
    let mut texts = Vec::new();
    for out in ["a", "b"] {
        let out = tmp.path().join(out);
        let o = pgplan(&["build", "--config", cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let dirs = run_dirs(&out);
        assert_eq!(dirs.len(), 1);
        texts.push((dirs[0].file_name().unwrap().to_owned(), std::fs::read(dirs[0].join("model.mps")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
    assert!(!texts[0].1.is_empty());
}

#[test]
fn run_writes_full_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    let f = synthetic::micro_gas_network();
    let cfg = write_case(tmp.path(), &f);
    let o = pgplan(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dirs = run_dirs(&tmp.path().join("out"));
    assert_eq!(dirs.len(), 1);
    let d = &dirs[0];
    for file in ["model.mps", "solution.sol", "audit.json", "summary.json", "repdays.csv"] {
        assert!(d.join(file).exists(), "{file}");
    }
    for t in TABLES {
        let text = std::fs::read_to_string(d.join(format!("{t}.csv"))).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    }
    assert_eq!(json(&d.join("audit.json"))["passed"], true);
    let summary = json(&d.join("summary.json"));
    assert_eq!(summary["status"], "optimal");
    assert_eq!(summary["outcome"], "ok");
    let hash = summary["hash"].as_str().unwrap();
    assert!(hash.starts_with(d.file_name().unwrap().to_str().unwrap()));

    let m = pgplan_core::build::build_model(f.input()).unwrap();
    let direct = pgplan_milp::SolverAdapter::solve(&pgplan_milp::HighsSolver::with_gap(1e-9), &m).unwrap();
    let obj = summary["objective"].as_f64().unwrap();
    let want = direct.objective.unwrap();
    assert!((obj - want).abs() <= 1e-6 * want.abs().max(1.0), "{obj} vs {want}");
}

#[test]
fn infeasible_run_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mut f = synthetic::micro_nuclear_only();
    // nothing renewable to build
    f.scenario.rps_level = 1.0;
    let cfg = write_case(tmp.path(), &f);
    let o = pgplan(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let d = &run_dirs(&tmp.path().join("out"))[0];
    assert_eq!(json(&d.join("summary.json"))["status"], "infeasible");
    assert!(!d.join("audit.json").exists());
}

/// Stand-in for CBC that reports every column at zero.
const ZERO_SOLVER: &str = r#"#!/bin/sh
mps="$1"; sol=""
while [ $# -gt 0 ]; do
  if [ "$1" = solu ]; then sol="$2"; fi
  shift
done
echo "Optimal - objective value 0" > "$sol"
awk '/^COLUMNS/ {c=1; next} /^RHS/ {c=0} c && $1 != "MARKER" && !seen[$1]++ {print n++, $1, 0, 0}' "$mps" >> "$sol"
"#;

#[test]
fn audit_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_case(tmp.path(), &synthetic::micro_nuclear_only());
    let script = tmp.path().join("fake-cbc");
    std::fs::write(&script, ZERO_SOLVER).unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let o = Command::new(BIN)
        .args(["run", "--config", cfg.to_str().unwrap(), "--solver", "cbc"])
        .env("PGPLAN_SOLVER", &script)
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let d = &run_dirs(&tmp.path().join("out"))[0];
    let audit = json(&d.join("audit.json"));
    assert_eq!(audit["passed"], false);
    assert!(audit["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v["row"].as_str().unwrap().starts_with("bal_e[a]")));
}

#[test]
fn missing_solver_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_case(tmp.path(), &synthetic::micro_nuclear_only());
    let o = Command::new(BIN)
        .args(["run", "--config", cfg.to_str().unwrap(), "--solver", "cbc"])
        .env("PGPLAN_SOLVER", tmp.path().join("no-such-solver"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not found"));
}

#[test]
fn bad_config_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("config.json");
    std::fs::write(&path, r#"{"system": "nowhere", "demand": {"BAU": "x"}}"#).unwrap();
    assert_eq!(pgplan(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&path, r#"{"system": "s", "demand": {}, "colour": 1}"#).unwrap();
    assert_eq!(pgplan(&["build", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

fn scenarios_in(csv: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(csv).unwrap();
    let mut v: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    v.dedup();
    v
}

#[test]
fn sweep_runs_every_combination() {
    let tmp = tempfile::tempdir().unwrap();
    let mut f = synthetic::micro_gas_network();
    f.scenario.emissions_budget_tons = None;
    let cfg = write_case(tmp.path(), &f);
    let o = pgplan(&["sweep", "--config", cfg.to_str().unwrap(), "--cases", "C1,C3", "--zetas", "0.8,0.9"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("out");
    assert_eq!(run_dirs(&out).len(), 4);
    assert_eq!(
        scenarios_in(&out.join("sweep/costs.csv")),
        ["C1-BAU-z0.80", "C3-BAU-z0.80", "C1-BAU-z0.90", "C3-BAU-z0.90"]
    );
    assert_eq!(
        scenarios_in(&out.join("sweep/diff/costs.csv")),
        ["C3-BAU-z0.80-C1-BAU-z0.80", "C3-BAU-z0.90-C1-BAU-z0.90"]
    );
}

#[test]
fn sensitivity_grid_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_case(tmp.path(), &synthetic::micro_gas_network());
    let o = pgplan(&["sensitivity", "--config", cfg.to_str().unwrap(), "--ng", "2,10", "--lcdf", "10,40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(tmp.path().join("out/sensitivity/costs.csv")).unwrap();
    let mut prices: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].to_string(), c[2].to_string())
        })
        .collect();
    prices.dedup();
    assert_eq!(
        prices,
        [("2", "10"), ("2", "40"), ("10", "10"), ("10", "40")].map(|(a, b)| (a.to_string(), b.to_string()))
    );
}

#[test]
fn repdays_writes_grid_and_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let f = synthetic::medium();
    let cfg = write_case(tmp.path(), &f);
    let out = tmp.path().join("rd");
    let o = pgplan(&["repdays", "--config", cfg.to_str().unwrap(), "--repdays", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rd = std::fs::read_to_string(out.join("repdays.csv")).unwrap();
    assert_eq!(rd.lines().count(), 5);
    let weights: u32 = rd.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u32>().unwrap()).sum();
    assert_eq!(weights, 365);
    assert_eq!(std::fs::read_to_string(out.join("ldc.csv")).unwrap().lines().count(), 8761);
}
