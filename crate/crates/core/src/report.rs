//! Presentation tables built from a solved plan.

use std::collections::BTreeMap;
use std::path::Path;

use pgplan_milp::Solution;
use serde::Serialize;

use crate::audit::audit_solution;
use crate::build::ModelInput;
use crate::error::AuditError;
use crate::names::{name, r};

pub const TABLES: [&str; 6] = [
    "capacity",
    "generation",
    "costs",
    "emissions",
    "storage",
    "network",
];

pub const CSV_COLUMNS: [&str; 5] = ["scenario", "ng_price", "lcdf_price", "key", "value"];

const MW_PER_GW: f64 = 1e3;
const MWH_PER_TWH: f64 = 1e6;
const MWH_PER_GWH: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub scenario: String,
    pub ng_price: f64,
    pub lcdf_price: f64,
    /// Emissions cap the plan was solved under; scenario data, so kept out of the tables.
    pub budget_tons: f64,
    pub tables: BTreeMap<String, BTreeMap<String, f64>>,
}

impl PlanReport {
    fn empty(scenario: String, ng_price: f64, lcdf_price: f64, budget_tons: f64) -> Self {
        Self {
            scenario,
            ng_price,
            lcdf_price,
            budget_tons,
            tables: TABLES.iter().map(|t| (t.to_string(), BTreeMap::new())).collect(),
        }
    }

    pub fn get(&self, table: &str, key: &str) -> Option<f64> {
        self.tables.get(table)?.get(key).copied()
    }

    fn put(&mut self, table: &str, key: impl Into<String>, v: f64) {
        *self
            .tables
            .get_mut(table)
            .expect("fixed table set")
            .entry(key.into())
            .or_default() += v;
    }

    pub fn is_zero(&self) -> bool {
        self.tables.values().flat_map(|t| t.values()).all(|&v| v == 0.0)
    }
}

fn val(sol: &Solution, n: &str) -> Result<f64, AuditError> {
    sol.value(n)
        .ok_or_else(|| AuditError::MissingVariable(n.to_string()))
}

/// Rated duration in hours: energy times discharge efficiency over power.
pub fn rated_duration(energy_mwh: f64, discharge_eff: f64, power_mw: f64) -> f64 {
    if power_mw > 0.0 {
        energy_mwh * discharge_eff / power_mw
    } else {
        0.0
    }
}

pub fn build_report(input: ModelInput<'_>, sol: &Solution) -> Result<PlanReport, AuditError> {
    let sys = input.system;
    let grid = input.grid;
    let sc = input.scenario;
    let audit = audit_solution(input, sol)?;
    let mut rep = PlanReport::empty(sc.name.clone(), sc.ng_price, sc.lcdf_price, audit.emissions.budget_tons);
    let nh = grid.num_hours();

    let mut cap_by_type: BTreeMap<&str, f64> = BTreeMap::new();
    let mut gen_by_type: BTreeMap<&str, f64> = BTreeMap::new();
    let mut burn = 0.0;
    for site in &sys.plant_sites {
        let pt = sys.plant_type(&site.plant_type).expect("validated");
        let (n, i) = (site.node.as_str(), pt.id.as_str());
        let xop = val(sol, &name("xop", &[n, i]))?;
        *cap_by_type.entry(i).or_default() += pt.nameplate_mw * xop;
        let mut e = 0.0;
        for t in 0..nh {
            e += grid.hour_weight(t) * val(sol, &name("p", &[n, &crate::names::h(t), i]))?;
        }
        *gen_by_type.entry(i).or_default() += e;
        if pt.is_gas_fired() {
            burn += e * pt.heat_rate_mmbtu_per_mwh;
        }
    }
    for (i, mw) in &cap_by_type {
        rep.put("capacity", *i, mw / MW_PER_GW);
        let e = gen_by_type[i];
        rep.put("generation", *i, e / MWH_PER_TWH);
        let cf = if *mw > 0.0 { e / (mw * 8760.0) } else { 0.0 };
        rep.put("generation", format!("cf:{i}"), cf);
    }
    let mut shed = 0.0;
    for node in &sys.power_nodes {
        for t in 0..nh {
            shed += grid.hour_weight(t) * val(sol, &name("ae", &[&node.id, &crate::names::h(t)]))?;
        }
    }
    rep.put("generation", "elec_shed", shed / MWH_PER_TWH);

    let mut draw = 0.0;
    for k in &sys.ng_nodes {
        for n in &k.adjacent_power_nodes {
            for rr in 0..grid.num_rep() {
                draw += grid.weights[rr] as f64 * val(sol, &name("fge", &[&k.id, n, &r(rr)]))?;
            }
        }
    }
    let (mut ng, mut lcdf, mut gshed) = (0.0, 0.0, 0.0);
    for k in &sys.ng_nodes {
        for day in 0..crate::timegrid::DAYS {
            let dd = crate::names::d(day);
            ng += val(sol, &name("g", &[&k.id, &dd]))?;
            lcdf += val(sol, &name("alcdf", &[&k.id, &dd]))?;
            gshed += val(sol, &name("ag", &[&k.id, &dd]))?;
        }
    }
    rep.put("generation", "fuel:gas_burn_mmbtu", burn);
    rep.put("generation", "fuel:gas_draw_mmbtu", draw);
    rep.put("generation", "fuel:ng_mmbtu", ng);
    rep.put("generation", "fuel:lcdf_mmbtu", lcdf);
    rep.put("generation", "fuel:gas_shed_mmbtu", gshed);

    for (k, v) in &audit.costs {
        rep.put("costs", k.as_str(), *v);
    }
    rep.put("costs", "total", audit.costs.values().sum::<f64>());

    let em = &audit.emissions;
    let total = em.power_tons + em.gas_tons;
    rep.put("emissions", "power_tons", em.power_tons);
    rep.put("emissions", "gas_tons", em.gas_tons);
    rep.put("emissions", "total_tons", total);
    let share = |x: f64, of: f64| if of > 0.0 { x / of } else { 0.0 };
    rep.put("emissions", "power_share", share(em.power_tons, total));
    rep.put("emissions", "power_share_of_budget", share(em.power_tons, em.budget_tons));
    rep.put("emissions", "gas_share_of_budget", share(em.gas_tons, em.budget_tons));

    let mut sto: BTreeMap<&str, (f64, f64, f64)> = BTreeMap::new();
    for node in &sys.power_nodes {
        for sid in &node.storage_types {
            let st = sys.storage_type(sid).expect("validated");
            if !sc.storage_enabled(st) {
                continue;
            }
            let p = val(sol, &name("ycd", &[&node.id, sid]))?;
            let e = val(sol, &name("ylev", &[&node.id, sid]))?;
            let acc = sto.entry(sid.as_str()).or_insert((0.0, 0.0, st.discharge_eff));
            acc.0 += p;
            acc.1 += e;
        }
    }
    for (s, (p, e, eff)) in &sto {
        rep.put("capacity", format!("storage:{s}"), p / MW_PER_GW);
        rep.put("storage", format!("{s}:power_gw"), p / MW_PER_GW);
        rep.put("storage", format!("{s}:energy_gwh"), e / MWH_PER_GWH);
        rep.put("storage", format!("{s}:duration_h"), rated_duration(*e, *eff, *p));
    }

    let mut lines = 0.0;
    for l in sys.lines.iter().filter(|l| !l.is_existing) {
        let z = val(sol, &name("ze", &[&l.id]))?.round();
        rep.put("network", format!("line:{}", l.id), z);
        lines += z;
    }
    let mut pipes = 0.0;
    for l in sys.pipelines.iter().filter(|l| !l.is_existing) {
        let z = val(sol, &name("zg", &[&l.id]))?.round();
        rep.put("network", format!("pipe:{}", l.id), z);
        pipes += z;
    }
    rep.put("network", "lines_built", lines);
    rep.put("network", "pipelines_built", pipes);
    for j in &sys.svl_nodes {
        rep.put("network", format!("svl_storage_added:{}", j.id), val(sol, &name("xstr", &[&j.id]))?);
        rep.put("network", format!("svl_vapor_added:{}", j.id), val(sol, &name("xvpr", &[&j.id]))?);
    }
    Ok(rep)
}

/// Elementwise `b − a`; keys present in only one report count as zero in the other.
pub fn diff_reports(a: &PlanReport, b: &PlanReport) -> PlanReport {
    let mut out = PlanReport::empty(
        format!("{}-{}", b.scenario, a.scenario),
        b.ng_price - a.ng_price,
        b.lcdf_price - a.lcdf_price,
        b.budget_tons - a.budget_tons,
    );
    for t in TABLES {
        let (ta, tb) = (&a.tables[t], &b.tables[t]);
        for k in ta.keys().chain(tb.keys()) {
            let v = tb.get(k).copied().unwrap_or(0.0) - ta.get(k).copied().unwrap_or(0.0);
            out.tables.get_mut(t).unwrap().insert(k.clone(), v);
        }
    }
    out
}

/// Writes `<table>.csv` for every table, one row per (report, key).
pub fn emit_plot_data(reports: &[PlanReport], dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(TABLES.len());
    for t in TABLES {
        let path = dir.join(format!("{t}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(CSV_COLUMNS)?;
        for rep in reports {
            for (k, v) in &rep.tables[t] {
                w.write_record([
                    rep.scenario.as_str(),
                    &rep.ng_price.to_string(),
                    &rep.lcdf_price.to_string(),
                    k,
                    &v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
