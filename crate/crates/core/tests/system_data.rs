use std::collections::BTreeMap;

use pgplan_core::scenario::{build_he_from_bau, emissions_budget, sensitivity_grid, BudgetRule};
use pgplan_core::synthetic::{self, new_england_system, synthetic_demand};
use pgplan_core::timegrid::{load_duration_diagnostic, select_rep_days, DAYS, HOURS};
use pgplan_core::topology::{annualize, effective_plant_capex, load_system};
use pgplan_core::{EmissionsScope, Scenario, ScenarioError, TimeGrid, TimeGridError, TopologyError};
use proptest::prelude::*;

fn annuity(lt: f64, w: f64) -> f64 {
    w / (1.0 - (1.0 + w).powf(-lt))
}

#[test]
fn new_england_files_roundtrip() {
    let sys = new_england_system();
    let dir = tempfile::tempdir().unwrap();
    sys.write(dir.path()).unwrap();
    let loaded = load_system(dir.path()).unwrap();
    assert_eq!(loaded, sys);
    assert_eq!(loaded.lines.iter().filter(|l| l.is_existing).count(), 23);
    assert_eq!(loaded.lines.iter().filter(|l| !l.is_existing).count(), 7);
    assert_eq!(loaded.pipelines.iter().filter(|l| l.is_existing).count(), 28);
    assert_eq!(loaded.pipelines.iter().filter(|l| !l.is_existing).count(), 36);

    // second round trip is byte-identical
    let again = tempfile::tempdir().unwrap();
    loaded.write(again.path()).unwrap();
    for f in pgplan_core::topology::SYSTEM_FILES {
        let a = std::fs::read(dir.path().join(f)).unwrap();
        let b = std::fs::read(again.path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn no_candidates_loads() {
    let mut sys = new_england_system();
    sys.lines.retain(|l| l.is_existing);
    let dir = tempfile::tempdir().unwrap();
    sys.write(dir.path()).unwrap();
    let loaded = load_system(dir.path()).unwrap();
    assert!(loaded.lines.iter().all(|l| l.is_existing));

    let mut empty = sys.clone();
    empty.lines.clear();
    let dir = tempfile::tempdir().unwrap();
    empty.write(dir.path()).unwrap();
    assert!(load_system(dir.path()).unwrap().lines.is_empty());
}

#[test]
fn unknown_pipeline_endpoint_is_reported() {
    let sys = new_england_system();
    let dir = tempfile::tempdir().unwrap();
    sys.write(dir.path()).unwrap();
    let path = dir.path().join("pipelines.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let first_to = sys.pipelines[0].to_node.clone();
    let line = text.lines().nth(1).unwrap().to_string();
    let broken = line.replacen(&format!(",{first_to},"), ",X9,", 1);
    assert_ne!(line, broken);
    std::fs::write(&path, text.replacen(&line, &broken, 1)).unwrap();
    match load_system(dir.path()) {
        Err(TopologyError::MissingReference { id, .. }) => assert_eq!(id, "X9"),
        other => panic!("expected MissingReference, got {other:?}"),
    }
}

#[test]
fn candidate_pipeline_capacity_defaults_to_existing_mean() {
    let sys = new_england_system();
    let dir = tempfile::tempdir().unwrap();
    sys.write(dir.path()).unwrap();
    let path = dir.path().join("pipelines.csv");
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let cap_col = headers.iter().position(|h| h == "capacity_mmbtu_per_day").unwrap();
    let exist_col = headers.iter().position(|h| h == "is_existing").unwrap();
    let mut w = csv::Writer::from_path(dir.path().join("p.tmp")).unwrap();
    w.write_record(&headers).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let row: Vec<String> = rec
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i == cap_col && &rec[exist_col] == "false" {
                    String::new()
                } else {
                    v.to_string()
                }
            })
            .collect();
        w.write_record(&row).unwrap();
    }
    w.flush().unwrap();
    std::fs::rename(dir.path().join("p.tmp"), &path).unwrap();
    let loaded = load_system(dir.path()).unwrap();
    let existing: Vec<f64> = loaded
        .pipelines
        .iter()
        .filter(|p| p.is_existing)
        .map(|p| p.capacity_mmbtu_per_day)
        .collect();
    let mean = existing.iter().sum::<f64>() / existing.len() as f64;
    for p in loaded.pipelines.iter().filter(|p| !p.is_existing) {
        assert!((p.capacity_mmbtu_per_day - mean).abs() <= 1e-9 * mean);
    }
}

#[test]
fn annualization_examples() {
    assert!((annualize(1.0, 30.0, 0.071).unwrap() - 0.08140).abs() < 1e-4);
    assert_eq!(annualize(0.0, 17.0, 0.05).unwrap(), 0.0);
    assert!((annualize(1.0, 1.0, 0.071).unwrap() - 1.071).abs() < 1e-12);
    assert!(matches!(annualize(1.0, 30.0, 0.0), Err(TopologyError::NonPositiveRate(_))));
}

#[test]
fn regional_capex_examples() {
    let sys = new_england_system();
    let ct = sys.power_node("CT").unwrap();
    let vt = sys.power_node("VT").unwrap();
    let ccgt = sys.plant_type("CCGT").unwrap();
    let upv = sys.plant_type("solar-UPV").unwrap();
    let f = annuity(30.0, 0.071);
    let got = effective_plant_capex(ccgt, ct, 0.071).unwrap();
    assert!((got - 5.36e8 * f * 1.3).abs() < 1e-6 * got);
    let got = effective_plant_capex(upv, vt, 0.071).unwrap();
    assert!((got - 6.72e6 * f * 1.05).abs() < 1e-6 * got);
    let ng = sys.plant_type("ng").unwrap();
    assert_eq!(ct.multiplier(&ng.id), 1.0);
    let hydro = sys.plant_type("hydro").unwrap();
    assert!(!hydro.retirable);
}

fn two_valued(winter_days: usize) -> (BTreeMap<String, Vec<f64>>, BTreeMap<String, Vec<f64>>) {
    let elec = (0..HOURS)
        .map(|t| if t / 24 < winter_days { 900.0 + (t % 24) as f64 } else { 500.0 })
        .collect();
    let gas = (0..DAYS).map(|d| if d < winter_days { 80.0 } else { 20.0 }).collect();
    (
        BTreeMap::from([("n".to_string(), elec)]),
        BTreeMap::from([("k".to_string(), gas)]),
    )
}

#[test]
fn rep_day_examples() {
    let (e, g) = two_valued(180);
    let full = select_rep_days(&e, &g, 365, 0).unwrap();
    assert!(full.weights.iter().all(|&w| w == 1));
    assert_eq!(load_duration_diagnostic(&full, &e).max_abs_gap, 0.0);

    let two = select_rep_days(&e, &g, 2, 0).unwrap();
    let mut w = two.weights.clone();
    w.sort();
    assert_eq!(w, vec![180, 185]);
    // two-valued series reconstructs exactly
    assert_eq!(load_duration_diagnostic(&two, &e).max_abs_gap, 0.0);

    let flat = BTreeMap::from([("n".to_string(), vec![7.0; HOURS])]);
    let flat_g = BTreeMap::from([("k".to_string(), vec![1.0; DAYS])]);
    match select_rep_days(&flat, &flat_g, 1, 3) {
        Ok(one) => {
            assert_eq!(one.weights, vec![365]);
            assert_eq!(one.num_hours() * 365, 8760);
            assert_eq!(load_duration_diagnostic(&one, &flat).max_abs_gap, 0.0);
        }
        Err(e) => panic!("{e}"),
    }
    assert!(matches!(
        select_rep_days(&flat, &flat_g, 2, 3),
        Err(TimeGridError::DegenerateInput { .. })
    ));
}

#[test]
fn rep_days_file_reproduces_grid() {
    let sys = new_england_system();
    let d = synthetic_demand(&sys, 1e6, 1e6, 5);
    let grid = select_rep_days(&d.elec, &d.gas, 10, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("repdays.csv");
    grid.write_repdays(&path).unwrap();
    let back = pgplan_core::timegrid::load_rep_days(&path, &d.elec, &d.gas).unwrap();
    assert_eq!(back.rep_days, grid.rep_days);
    assert_eq!(back.weights, grid.weights);
}

#[test]
fn budget_examples() {
    let b = |scope, z| emissions_budget(scope, z, 43.9e6, 23.6e6, None, BudgetRule::Table);
    assert!((b(EmissionsScope::Joint, 0.8) - 5.40e7).abs() < 1e-6 * 5.4e7);
    assert!((b(EmissionsScope::PowerOnly, 0.8) - 3.512e7).abs() < 1e-6 * 3.5e7);
    assert_eq!(b(EmissionsScope::Joint, 1.0), 43.9e6 + 23.6e6);
    let eq = emissions_budget(EmissionsScope::Joint, 0.8, 43.9e6, 23.6e6, None, BudgetRule::Equation);
    assert!((eq - 0.2 * 67.5e6).abs() < 1.0);
    let fixed = emissions_budget(EmissionsScope::Joint, 0.8, 43.9e6, 23.6e6, Some(1.0e6), BudgetRule::Table);
    assert_eq!(fixed, 1.0e6);
}

#[test]
fn sensitivity_grid_examples() {
    let base = Scenario::default();
    let g = sensitivity_grid(&base, &[2.0, 4.0, 5.45, 8.0, 10.0, 15.0], &[10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]).unwrap();
    assert_eq!(g.len(), 42);
    let one = sensitivity_grid(&base, &[3.0], &[9.0]).unwrap();
    assert_eq!(one.len(), 1);
    let mut expect = base.clone();
    expect.ng_price = 3.0;
    expect.lcdf_price = 9.0;
    expect.name = one[0].name.clone();
    assert_eq!(one[0], expect);
    assert!(matches!(sensitivity_grid(&base, &[], &[1.0]), Err(ScenarioError::EmptyGrid)));
}

#[test]
fn he_transform_reference_totals() {
    // scale the synthetic BAU so totals equal the reported BAU figures
    let sys = new_england_system();
    let bau = synthetic_demand(&sys, 128.64e6, 5.15e7, 1);
    let elec_total = 128.64e6;
    let delta: BTreeMap<String, Vec<f64>> = bau
        .elec
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().map(|x| x * (145.11e6 - elec_total) / elec_total).collect()))
        .collect();
    let share: BTreeMap<String, Vec<f64>> = bau
        .gas
        .keys()
        .map(|k| (k.clone(), vec![1.0 - 4.44 / 5.15; DAYS]))
        .collect();
    let he = build_he_from_bau(&bau, &delta, &share).unwrap();
    assert!((he.bau.elec_mwh / 1e6 - 128.64).abs() < 1e-6);
    assert!((he.he.elec_mwh / 1e6 - 145.11).abs() < 1e-6);
    let rise = he.he.elec_mwh / he.bau.elec_mwh - 1.0;
    assert!((rise - 0.128).abs() < 5e-4, "{rise}");
    let fall = 1.0 - he.he.gas_mmbtu / he.bau.gas_mmbtu;
    assert!((fall - 0.139).abs() < 2e-3, "{fall}");
    assert!((he.he.gas_mmbtu - 4.44e7).abs() < 1.0);

    let zero_d: BTreeMap<String, Vec<f64>> = bau.elec.keys().map(|k| (k.clone(), vec![0.0; HOURS])).collect();
    let zero_s: BTreeMap<String, Vec<f64>> = bau.gas.keys().map(|k| (k.clone(), vec![0.0; DAYS])).collect();
    assert_eq!(build_he_from_bau(&bau, &zero_d, &zero_s).unwrap().demand, bau);
}

#[test]
fn heating_electrification_moves_gas_to_power() {
    let system = new_england_system();
    let bau = synthetic_demand(&system, 1.0e8, 4.0e8, 3);
    let (delta, share) = synthetic::heating_electrification(&system, &bau, 0.4);
    let he = build_he_from_bau(&bau, &delta, &share).unwrap();
    // nodes without a power neighbour keep their load
    let expect: f64 = system
        .ng_nodes
        .iter()
        .map(|k| {
            let g: f64 = bau.gas[&k.id].iter().sum();
            if k.adjacent_power_nodes.is_empty() { g } else { 0.6 * g }
        })
        .sum();
    assert!((he.he.gas_mmbtu - expect).abs() < 1e-9 * expect);
    assert!(he.he.gas_mmbtu < 0.9 * he.bau.gas_mmbtu);
    let moved = he.bau.gas_mmbtu - he.he.gas_mmbtu;
    let added = he.he.elec_mwh - he.bau.elec_mwh;
    // furnace 0.85, heat pump COP 2.5
    assert!((added - moved * 0.85 / (3.412 * 2.5)).abs() < 1e-6 * added);
    let (d0, _) = synthetic::heating_electrification(&system, &bau, 0.0);
    assert!(d0.values().flatten().all(|&v| v == 0.0));
}

#[test]
fn demand_files_roundtrip() {
    let f = synthetic::micro_storage();
    let dir = tempfile::tempdir().unwrap();
    f.demand.write(dir.path()).unwrap();
    let back = pgplan_core::DemandSet::load(dir.path()).unwrap();
    assert_eq!(back, f.demand);
}

fn demand_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.0f64..100.0, DAYS),
        prop::collection::vec(0.0f64..5.0, 24),
    )
        .prop_map(|(daily, shape)| {
            let elec = (0..HOURS).map(|t| daily[t / 24] + shape[t % 24]).collect();
            (elec, daily)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn annualize_linear_and_decreasing(c in 0.0f64..1e9, lt in 1.0f64..80.0, w in 0.001f64..0.3) {
        let a = annualize(c, lt, w).unwrap();
        let b = annualize(2.0 * c, lt, w).unwrap();
        prop_assert!((b - 2.0 * a).abs() <= 1e-9 * b.abs().max(1.0));
        let one = annualize(1.0, lt, w).unwrap();
        let longer = annualize(1.0, lt + 1.0, w).unwrap();
        prop_assert!(longer < one);
    }

    #[test]
    fn budget_monotone_in_zeta(z1 in 0.0f64..1.0, z2 in 0.0f64..1.0, joint in any::<bool>()) {
        let scope = if joint { EmissionsScope::Joint } else { EmissionsScope::PowerOnly };
        let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
        let b = |z| emissions_budget(scope, z, 43.9e6, 23.6e6, None, BudgetRule::Table);
        prop_assert!(b(lo) <= b(hi));
    }

    #[test]
    fn grid_weights_and_maps((elec, gas) in demand_strategy(), k in 1usize..12, seed in 0u64..4) {
        let e = BTreeMap::from([("n".to_string(), elec)]);
        let g = BTreeMap::from([("k".to_string(), gas)]);
        let grid: TimeGrid = match select_rep_days(&e, &g, k, seed) {
            Ok(g) => g,
            Err(TimeGridError::DegenerateInput { .. }) => return Ok(()),
            Err(other) => return Err(TestCaseError::fail(other.to_string())),
        };
        prop_assert_eq!(grid.weights.iter().sum::<u32>(), 365);
        let hour_weights: f64 = (0..grid.num_hours()).map(|t| grid.hour_weight(t)).sum();
        prop_assert_eq!(hour_weights, 8760.0);
        // Omega is idempotent: a representative day maps to its own cluster
        for (r, &day) in grid.rep_days.iter().enumerate() {
            prop_assert_eq!(grid.day_of[day], r);
        }
        // phi is injective and keeps within-day order
        let phis: Vec<usize> = (0..grid.num_hours()).map(|t| grid.phi(t)).collect();
        let mut sorted = phis.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), phis.len());
        for t in 0..grid.num_hours() {
            if t % 24 != 23 {
                prop_assert_eq!(phis[t + 1], phis[t] + 1);
            }
        }
        // same seed, same grid
        let again = select_rep_days(&e, &g, k, seed).unwrap();
        prop_assert_eq!(again, grid);
    }

    #[test]
    fn he_is_pointwise_monotone(bump in 0.0f64..50.0, share in 0.0f64..1.0) {
        let f = synthetic::micro_svl();
        let delta = f.demand.elec.keys().map(|k| (k.clone(), vec![bump; HOURS])).collect();
        let shares = f.demand.gas.keys().map(|k| (k.clone(), vec![share; DAYS])).collect();
        let he = build_he_from_bau(&f.demand, &delta, &shares).unwrap();
        for (k, v) in &he.demand.elec {
            prop_assert!(v.iter().zip(&f.demand.elec[k]).all(|(a, b)| a >= b));
        }
        for (k, v) in &he.demand.gas {
            prop_assert!(v.iter().zip(&f.demand.gas[k]).all(|(a, b)| a <= b));
        }
    }
}
