use pgplan_core::build::build_model;
use pgplan_core::report::{build_report, diff_reports, emit_plot_data, PlanReport, CSV_COLUMNS, TABLES};
use pgplan_core::scenario::sensitivity_grid;
use pgplan_core::synthetic::{self, Fixture};
use pgplan_core::Case;
use pgplan_milp::{HighsSolver, Solution, SolveStatus, SolverAdapter};

fn solve(f: &Fixture) -> Solution {
    let m = build_model(f.input()).unwrap();
    let sol = HighsSolver::with_gap(1e-9).solve(&m).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal, "{}", f.name);
    sol
}

fn report(f: &Fixture) -> (PlanReport, f64) {
    let sol = solve(f);
    (build_report(f.input(), &sol).unwrap(), sol.objective.unwrap())
}

#[test]
fn zero_demand_report_is_all_zero() {
    let (r, _) = report(&synthetic::micro_zero_demand());
    assert!(r.is_zero(), "{:?}", r.tables);
    assert_eq!(r.tables.len(), TABLES.len());
}

#[test]
fn cost_categories_sum_to_objective() {
    for f in synthetic::micro_fixtures() {
        let (r, obj) = report(&f);
        let total = r.get("costs", "total").unwrap();
        assert!((total - obj).abs() <= 1e-6 * obj.abs().max(1.0), "{}: {total} vs {obj}", f.name);
        let parts: f64 = r.tables["costs"].iter().filter(|(k, _)| *k != "total").map(|(_, v)| v).sum();
        assert!((parts - total).abs() <= 1e-9 * total.abs().max(1.0));
    }
}

#[test]
fn fuel_ledger_closes() {
    for f in [synthetic::micro_gas_network(), synthetic::micro_ccs(), synthetic::micro_candidate_line()] {
        let (r, _) = report(&f);
        let burn = r.get("generation", "fuel:gas_burn_mmbtu").unwrap();
        let draw = r.get("generation", "fuel:gas_draw_mmbtu").unwrap();
        assert!((burn - draw).abs() <= 1e-6 * burn.max(1.0), "{}: {burn} vs {draw}", f.name);
    }
    let (r, _) = report(&synthetic::micro_gas_network());
    assert!(r.get("generation", "fuel:gas_burn_mmbtu").unwrap() > 0.0);
}

#[test]
fn nuclear_generation_and_capacity() {
    let (r, _) = report(&synthetic::micro_nuclear_only());
    assert!((r.get("capacity", "nuclear").unwrap() - 0.1).abs() < 1e-12);
    assert!((r.get("generation", "nuclear").unwrap() - 0.876).abs() < 1e-9);
    assert!((r.get("generation", "cf:nuclear").unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r.get("emissions", "total_tons"), Some(0.0));
}

#[test]
fn storage_duration_from_sizes() {
    let f = synthetic::micro_storage();
    let sol = solve(&f);
    let r = build_report(f.input(), &sol).unwrap();
    for st in &f.system.storage_types {
        let Some(p) = r.get("storage", &format!("{}:power_gw", st.id)) else { continue };
        let e = r.get("storage", &format!("{}:energy_gwh", st.id)).unwrap();
        let dur = r.get("storage", &format!("{}:duration_h", st.id)).unwrap();
        if p > 0.0 {
            assert!((dur - e * st.discharge_eff / p).abs() < 1e-9 * dur.max(1.0));
        } else {
            assert_eq!(dur, 0.0);
        }
    }
}

#[test]
fn joint_cap_adds_shedding_relative_to_power_cap() {
    let base = synthetic::micro_gas_network();
    let mut free = base.clone();
    free.scenario.apply_case(Case::C1);
    free.scenario.emissions_budget_tons = Some(1e12);
    let (r0, _) = report(&free);
    let ee = r0.get("emissions", "power_tons").unwrap();
    let eg = r0.get("emissions", "gas_tons").unwrap();
    assert!(eg > 0.0);
    // loose for the power sector alone, binding once gas emissions count
    let budget = ee + 0.5 * eg;

    let mut c1 = base.clone();
    c1.scenario.apply_case(Case::C1);
    c1.scenario.emissions_budget_tons = Some(budget);
    let mut c2 = base;
    c2.scenario.apply_case(Case::C2);
    c2.scenario.emissions_budget_tons = Some(budget);
    let (r1, o1) = report(&c1);
    let (r2, o2) = report(&c2);
    let shed = |r: &PlanReport| r.get("costs", "elec_shed").unwrap() + r.get("costs", "gas_shed").unwrap();
    assert_eq!(shed(&r1), 0.0);
    assert!(shed(&r2) > 0.0);
    let delta = diff_reports(&r1, &r2);
    assert!(delta.get("costs", "total").unwrap() > 0.0);
    assert!((delta.get("costs", "total").unwrap() - (o2 - o1)).abs() <= 1e-6 * o2);
    assert!(delta.get("emissions", "total_tons").unwrap() < 0.0);
}

#[test]
fn sensitivity_grid_emits_long_format() {
    let (r, _) = report(&synthetic::micro_nuclear_only());
    let grid = sensitivity_grid(
        &synthetic::micro_nuclear_only().scenario,
        &[2.0, 4.0, 5.45, 8.0, 10.0, 15.0],
        &[10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
    )
    .unwrap();
    let reports: Vec<PlanReport> = grid
        .iter()
        .map(|s| PlanReport {
            scenario: s.name.clone(),
            ng_price: s.ng_price,
            lcdf_price: s.lcdf_price,
            ..r.clone()
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_plot_data(&reports, dir.path()).unwrap();
    assert_eq!(files.len(), 6);
    let mut rdr = csv::Reader::from_path(dir.path().join("capacity.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 42 * r.tables["capacity"].len());
    let mut pairs: Vec<(String, String)> = rows.iter().map(|x| (x[1].to_string(), x[2].to_string())).collect();
    pairs.sort();
    pairs.dedup();
    assert_eq!(pairs.len(), 42);
}
