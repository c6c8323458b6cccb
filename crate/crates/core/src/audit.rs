//! Solver-independent verification of a solution.
//!
//! Every row family is re-evaluated from the system data and the solution's
//! named values; nothing here reads the assembled model's rows.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use pgplan_milp::{MilpModel, Solution, SolveStatus, SolverAdapter, VarKind};
use serde::Serialize;

use crate::build::{build_model, ModelInput};
use crate::error::{AuditError, BuildError};
use crate::names::{d, h, name, r};
use crate::scenario::{EmissionsScope, SvlCycle};
use crate::timegrid::DAYS;
use crate::topology::{annualize, Fuel};

pub const REL_TOL: f64 = 1e-6;
pub const ABS_TOL: f64 = 1e-4;
const MAX_LISTED: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FamilyCheck {
    pub rows: usize,
    pub failed: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub worst_row: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub family: String,
    pub row: String,
    pub abs_residual: f64,
    pub rel_residual: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EmissionsCheck {
    pub power_tons: f64,
    pub gas_tons: f64,
    pub budget_tons: f64,
    /// `η^g` times fossil gas injected, net of SVL inventory flows and CCS capture.
    pub fossil_route_tons: f64,
    pub ledger_gap: f64,
    pub ledger_ok: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditReport {
    pub families: BTreeMap<String, FamilyCheck>,
    pub violations: Vec<Violation>,
    pub costs: BTreeMap<String, f64>,
    pub objective_recomputed: f64,
    pub objective_reported: Option<f64>,
    pub objective_rel_gap: f64,
    pub objective_ok: bool,
    pub emissions: EmissionsCheck,
    pub passed: bool,
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit report serializes")
    }

    /// True if `row` is among the recorded violations.
    pub fn flags(&self, row: &str) -> bool {
        self.violations.iter().any(|v| v.row == row)
    }
}

struct Checker<'s> {
    sol: &'s Solution,
    report: AuditReport,
}

impl Checker<'_> {
    fn v(&self, n: &str) -> Result<f64, AuditError> {
        self.sol
            .value(n)
            .ok_or_else(|| AuditError::MissingVariable(n.to_string()))
    }

    /// Records `Σ terms (cmp) rhs`; terms are already-evaluated products.
    fn check(&mut self, family: &str, row: String, terms: &[f64], cmp: Cmp, rhs: f64) {
        let lhs: f64 = terms.iter().sum();
        let viol = match cmp {
            Cmp::Le => (lhs - rhs).max(0.0),
            Cmp::Ge => (rhs - lhs).max(0.0),
            Cmp::Eq => (lhs - rhs).abs(),
        };
        let scale = terms
            .iter()
            .fold(rhs.abs().max(1.0), |a, t| a.max(t.abs()));
        let rel = viol / scale;
        let fam = self.report.families.entry(family.to_string()).or_default();
        fam.rows += 1;
        if rel > fam.max_rel_residual {
            fam.max_rel_residual = rel;
            fam.worst_row = Some(row.clone());
        }
        fam.max_abs_residual = fam.max_abs_residual.max(viol);
        if rel > REL_TOL && viol > ABS_TOL {
            fam.failed += 1;
            if self.report.violations.len() < MAX_LISTED {
                self.report.violations.push(Violation {
                    family: family.to_string(),
                    row,
                    abs_residual: viol,
                    rel_residual: rel,
                });
            }
        }
    }

    fn bound(&mut self, var: &str, lo: f64, hi: f64) -> Result<f64, AuditError> {
        let x = self.v(var)?;
        if lo > f64::NEG_INFINITY {
            self.check("bounds", format!("{var}>=lo"), &[x], Cmp::Ge, lo);
        }
        if hi < f64::INFINITY {
            self.check("bounds", format!("{var}<=hi"), &[x], Cmp::Le, hi);
        }
        Ok(x)
    }

    fn integral(&mut self, var: &str, x: f64) {
        self.check("integrality", var.to_string(), &[x - x.round()], Cmp::Eq, 0.0);
    }
}

fn add_cost(costs: &mut BTreeMap<String, f64>, key: &str, v: f64) {
    *costs.entry(key.to_string()).or_default() += v;
}

pub const COST_CATEGORIES: [&str; 12] = [
    "gen_str_inv_fom",
    "decommissioning",
    "vom_startup",
    "transmission",
    "co2_transport_storage",
    "fuel_uranium",
    "elec_shed",
    "pipeline_capex",
    "ng_purchase",
    "lcdf_purchase",
    "svl_inv_fom",
    "gas_shed",
];

/// Re-evaluates every row family, the objective and the emissions ledger.
pub fn audit_solution(input: ModelInput<'_>, sol: &Solution) -> Result<AuditReport, AuditError> {
    let sys = input.system;
    let grid = input.grid;
    let sc = input.scenario;
    let omega = sc.discount_rate;
    let ann = |c: f64, lt: f64| annualize(c, lt, omega).map_err(crate::error::BuildError::from);
    let nh = grid.num_hours();
    let hours: Vec<String> = (0..nh).map(h).collect();
    let days: Vec<String> = (0..DAYS).map(d).collect();
    let reps: Vec<String> = (0..grid.num_rep()).map(r).collect();
    let w: Vec<f64> = (0..nh).map(|t| grid.weights[t / 24] as f64).collect();
    let eta_g = sc.emission_factor;
    let mut ck = Checker {
        sol,
        report: AuditReport::default(),
    };
    let mut costs: BTreeMap<String, f64> =
        COST_CATEGORIES.iter().map(|k| (k.to_string(), 0.0)).collect();
    let elec = |n: &str, t: usize| input.demand.elec[n][grid.rep_days[t / 24] * 24 + t % 24];

    // per-node accumulators for the balance rows
    let mut bal: BTreeMap<&str, Vec<Vec<f64>>> = sys
        .power_nodes
        .iter()
        .map(|n| (n.id.as_str(), vec![Vec::new(); nh]))
        .collect();
    // gas-fired fuel per (node, rep day)
    let mut fuel: BTreeMap<&str, Vec<f64>> = sys
        .power_nodes
        .iter()
        .map(|n| (n.id.as_str(), vec![0.0; grid.num_rep()]))
        .collect();
    let mut capt: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut rps_lhs = 0.0;
    let mut e_power = 0.0;
    let mut captured_fuel = 0.0;
    let mut class_cap: BTreeMap<&str, Vec<f64>> = BTreeMap::new();

    for site in &sys.plant_sites {
        let pt = sys.plant_type(&site.plant_type).expect("validated");
        let node = sys.power_node(&site.node).expect("validated");
        let (n, i) = (site.node.as_str(), pt.id.as_str());
        let est_hi = if pt.is_existing {
            0.0
        } else {
            site.max_new.map_or(f64::INFINITY, f64::from)
        };
        let dec_hi = if pt.retirable {
            site.existing_count as f64
        } else {
            0.0
        };
        let xest = ck.bound(&name("xest", &[n, i]), 0.0, est_hi)?;
        let xdec = ck.bound(&name("xdec", &[n, i]), 0.0, dec_hi)?;
        let xop = ck.bound(&name("xop", &[n, i]), 0.0, f64::INFINITY)?;
        ck.integral(&name("xest", &[n, i]), xest);
        ck.integral(&name("xdec", &[n, i]), xdec);
        ck.integral(&name("xop", &[n, i]), xop);
        ck.check(
            "uc_op",
            name("uc_op", &[n, i]),
            &[xop, -xest, xdec],
            Cmp::Eq,
            site.existing_count as f64,
        );
        let cap = pt.nameplate_mw;
        add_cost(
            &mut costs,
            "gen_str_inv_fom",
            ann(pt.capex_per_plant, pt.lifetime_years)? * node.multiplier(i) * xest
                + pt.fom_per_plant * xop,
        );
        add_cost(
            &mut costs,
            "decommissioning",
            ann(pt.decom_cost_per_plant, pt.lifetime_years)? * xdec,
        );
        if let Some(q) = &pt.resource_class {
            class_cap.entry(q.as_str()).or_default().push(cap * xop);
        }
        let mut p = Vec::with_capacity(nh);
        for (t, ht) in hours.iter().enumerate() {
            let v = ck.bound(&name("p", &[n, ht, i]), 0.0, f64::INFINITY)?;
            bal.get_mut(n).unwrap()[t].push(v);
            add_cost(&mut costs, "vom_startup", w[t] * pt.vom_per_mwh * v);
            if pt.fuel != Fuel::GasFired {
                add_cost(
                    &mut costs,
                    "fuel_uranium",
                    w[t] * pt.fuel_price * pt.heat_rate_mmbtu_per_mwh * v,
                );
            } else {
                fuel.get_mut(n).unwrap()[t / 24] += pt.heat_rate_mmbtu_per_mwh * v;
                e_power += w[t] * (1.0 - pt.capture_rate) * eta_g * pt.heat_rate_mmbtu_per_mwh * v;
                captured_fuel += w[t] * pt.capture_rate * pt.heat_rate_mmbtu_per_mwh * v;
            }
            if pt.is_vre {
                rps_lhs += w[t] * v;
            }
            if pt.has_ccs {
                capt.entry(n).or_insert_with(|| vec![0.0; nh])[t] +=
                    eta_g * pt.capture_rate * pt.heat_rate_mmbtu_per_mwh * v;
            }
            p.push(v);
        }
        if pt.is_thermal_uc {
            let mut x = Vec::with_capacity(nh);
            let mut up = Vec::with_capacity(nh);
            let mut down = Vec::with_capacity(nh);
            for ht in &hours {
                x.push(ck.bound(&name("x", &[n, ht, i]), 0.0, f64::INFINITY)?);
                up.push(ck.bound(&name("xup", &[n, ht, i]), 0.0, f64::INFINITY)?);
                down.push(ck.bound(&name("xdown", &[n, ht, i]), 0.0, f64::INFINITY)?);
            }
            let ru = pt.ramp_frac * cap;
            let su = pt.min_stable_frac.max(pt.ramp_frac) * cap;
            for t in 0..nh {
                let prev = if t % 24 == 0 { t + 23 } else { t - 1 };
                let ht = &hours[t];
                ck.check(
                    "uc_chain",
                    name("uc_chain", &[n, ht, i]),
                    &[x[t], -x[prev], -up[t], down[t]],
                    Cmp::Eq,
                    0.0,
                );
                ck.check("uc_cap", name("uc_cap", &[n, ht, i]), &[x[t], -xop], Cmp::Le, 0.0);
                ck.check(
                    "gen_min",
                    name("gen_min", &[n, ht, i]),
                    &[pt.min_stable_frac * cap * x[t], -p[t]],
                    Cmp::Le,
                    0.0,
                );
                ck.check("gen_max", name("gen_max", &[n, ht, i]), &[p[t], -cap * x[t]], Cmp::Le, 0.0);
                let limit = [-(ru * (x[t] - up[t]) + su * up[t])];
                let d_up = [p[t], -p[prev], limit[0]];
                let d_dn = [p[prev], -p[t], limit[0]];
                ck.check("ramp_up", name("ramp_up", &[n, ht, i]), &d_up, Cmp::Le, 0.0);
                ck.check("ramp_dn", name("ramp_dn", &[n, ht, i]), &d_dn, Cmp::Le, 0.0);
                add_cost(&mut costs, "vom_startup", w[t] * pt.startup_cost * up[t]);
            }
        } else if pt.is_vre {
            for t in 0..nh {
                let rho = input.demand.cf_at(n, i, grid.phi(t));
                ck.check(
                    "vre_cap",
                    name("vre_cap", &[n, &hours[t], i]),
                    &[p[t], -rho * cap * xop],
                    Cmp::Le,
                    0.0,
                );
            }
        } else {
            for t in 0..nh {
                ck.check(
                    "gen_cap",
                    name("gen_cap", &[n, &hours[t], i]),
                    &[p[t], -cap * xop],
                    Cmp::Le,
                    0.0,
                );
            }
        }
    }

    for (q, terms) in &class_cap {
        if let Some(&cap) = sys.resource_limits.get(*q) {
            ck.check("res_lim", name("res_lim", &[q]), terms, Cmp::Le, cap);
        }
    }

    // lines
    let mut theta: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for node in &sys.power_nodes {
        let mut th = Vec::with_capacity(nh);
        for ht in &hours {
            th.push(ck.bound(&name("theta", &[&node.id, ht]), -PI, PI)?);
        }
        theta.insert(node.id.as_str(), th);
    }
    if let Some(refn) = sys.reference_node() {
        for t in 0..nh {
            let v = theta[refn][t];
            ck.check("theta_ref", name("theta_ref", &[&hours[t]]), &[v], Cmp::Eq, 0.0);
        }
    }
    for l in &sys.lines {
        let (lo, hi) = l.ordered();
        let b = l.susceptance;
        let z = if l.is_existing {
            None
        } else {
            let zn = name("ze", &[&l.id]);
            let z = ck.bound(&zn, 0.0, 1.0)?;
            ck.integral(&zn, z);
            add_cost(&mut costs, "transmission", ann(l.capex, l.lifetime_years)? * z);
            Some(z)
        };
        for t in 0..nh {
            let ht = &hours[t];
            let f = ck.v(&name("fe", &[&l.id, ht]))?;
            bal.get_mut(lo).unwrap()[t].push(-f);
            bal.get_mut(hi).unwrap()[t].push(f);
            let dc = [f, -b * theta[hi][t], b * theta[lo][t]];
            let id = [l.id.as_str(), ht.as_str()];
            match z {
                None => {
                    ck.check("flow_ub", name("flow_ub", &id), &[f], Cmp::Le, l.capacity_mw);
                    ck.check("flow_lb", name("flow_lb", &id), &[-f], Cmp::Le, l.capacity_mw);
                    ck.check("dc_exist", name("dc_exist", &id), &dc, Cmp::Eq, 0.0);
                }
                Some(z) => {
                    let u = l.capacity_mw;
                    let m = sc.big_m.unwrap_or(u + 2.0 * PI * b);
                    ck.check("cflow_ub", name("cflow_ub", &id), &[f, -u * z], Cmp::Le, 0.0);
                    ck.check("cflow_lb", name("cflow_lb", &id), &[-f, -u * z], Cmp::Le, 0.0);
                    let slack = -m * (1.0 - z);
                    ck.check("dc_cand_ub", name("dc_cand_ub", &id), &[dc[0], dc[1], dc[2], slack], Cmp::Le, 0.0);
                    ck.check("dc_cand_lb", name("dc_cand_lb", &id), &[-dc[0], -dc[1], -dc[2], slack], Cmp::Le, 0.0);
                }
            }
        }
    }

    // storage
    for node in &sys.power_nodes {
        let n = node.id.as_str();
        for sid in &node.storage_types {
            let st = sys.storage_type(sid).expect("validated");
            if !sc.storage_enabled(st) {
                continue;
            }
            let s = sid.as_str();
            let ycd = ck.bound(&name("ycd", &[n, s]), 0.0, f64::INFINITY)?;
            let ylev = ck.bound(&name("ylev", &[n, s]), 0.0, f64::INFINITY)?;
            add_cost(
                &mut costs,
                "gen_str_inv_fom",
                (ann(st.power_capex_per_mw, st.lifetime_years)? + st.power_fom_per_mw_yr) * ycd
                    + (ann(st.energy_capex_per_mwh, st.lifetime_years)? + st.energy_fom_per_mwh_yr)
                        * ylev,
            );
            let mut ch = Vec::with_capacity(nh);
            let mut dis = Vec::with_capacity(nh);
            let mut lev = Vec::with_capacity(nh);
            for (t, ht) in hours.iter().enumerate() {
                ch.push(ck.bound(&name("sch", &[n, ht, s]), 0.0, f64::INFINITY)?);
                dis.push(ck.bound(&name("sdis", &[n, ht, s]), 0.0, f64::INFINITY)?);
                lev.push(ck.bound(&name("slev", &[n, ht, s]), 0.0, f64::INFINITY)?);
                bal.get_mut(n).unwrap()[t].push(dis[t] - ch[t]);
            }
            let rem_hi = if st.is_long_duration { f64::INFINITY } else { 0.0 };
            let rem_lo = -rem_hi;
            let mut rem = Vec::with_capacity(reps.len());
            for rr in &reps {
                rem.push(ck.bound(&name("srem", &[n, rr, s]), rem_lo, rem_hi)?);
            }
            let keep = 1.0 - st.hourly_self_discharge;
            for t in 0..nh {
                let flows = [-st.charge_eff * ch[t], dis[t] / st.discharge_eff];
                if t % 24 == 0 {
                    let rep = t / 24;
                    let prev = keep * (lev[t + 23] - rem[rep]);
                    ck.check(
                        "sto_start",
                        name("sto_start", &[n, &reps[rep], s]),
                        &[lev[t], -prev, flows[0], flows[1]],
                        Cmp::Eq,
                        0.0,
                    );
                } else {
                    ck.check(
                        "sto_bal",
                        name("sto_bal", &[n, &hours[t], s]),
                        &[lev[t], -keep * lev[t - 1], flows[0], flows[1]],
                        Cmp::Eq,
                        0.0,
                    );
                }
                let id = [n, hours[t].as_str(), s];
                ck.check("sto_ch", name("sto_ch", &id), &[ch[t], -ycd], Cmp::Le, 0.0);
                ck.check("sto_dis", name("sto_dis", &id), &[dis[t], -ycd], Cmp::Le, 0.0);
                ck.check("sto_lev", name("sto_lev", &id), &[lev[t], -ylev], Cmp::Le, 0.0);
            }
            if st.is_long_duration {
                let mut sday = Vec::with_capacity(DAYS);
                for dd in &days {
                    sday.push(ck.bound(&name("sday", &[n, dd, s]), 0.0, f64::INFINITY)?);
                }
                let decay = 1.0 - 24.0 * st.hourly_self_discharge;
                for day in 0..DAYS {
                    ck.check(
                        "ldes_day",
                        name("ldes_day", &[n, &days[day], s]),
                        &[sday[(day + 1) % DAYS], -decay * sday[day], -rem[grid.day_of[day]]],
                        Cmp::Eq,
                        0.0,
                    );
                }
                for (rep, &cal) in grid.rep_days.iter().enumerate() {
                    ck.check(
                        "ldes_anchor",
                        name("ldes_anchor", &[n, &reps[rep], s]),
                        &[sday[cal], -lev[24 * rep + 23], rem[rep]],
                        Cmp::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    // node-level terms and balance
    let mut ccs_annual = Vec::new();
    let mut total_demand = 0.0;
    for node in &sys.power_nodes {
        let n = node.id.as_str();
        let has_ccs = capt.contains_key(n);
        let khi = if has_ccs { f64::INFINITY } else { 0.0 };
        let kpipe = ck.bound(&name("kpipe", &[n]), 0.0, khi)?;
        add_cost(
            &mut costs,
            "co2_transport_storage",
            node.co2_distance_miles * sys.ccs.pipe_capex_per_mile_ton * kpipe,
        );
        let pipe_e = node.co2_distance_miles * sys.ccs.pipe_elec_mwh_per_mile_ton_h;
        let comp_e = sys.ccs.compressors(node.co2_distance_miles) * sys.ccs.pump_elec_mwh_per_ton_h;
        for t in 0..nh {
            let ht = &hours[t];
            let dem = elec(n, t);
            total_demand += w[t] * dem;
            let ae = ck.bound(&name("ae", &[n, ht]), 0.0, dem)?;
            let kc = ck.bound(&name("kcapt", &[n, ht]), 0.0, khi)?;
            add_cost(&mut costs, "elec_shed", w[t] * sc.elec_shed_cost * ae);
            add_cost(&mut costs, "co2_transport_storage", w[t] * sys.ccs.storage_cost_per_ton * kc);
            let mut terms = std::mem::take(&mut bal.get_mut(n).unwrap()[t]);
            terms.push(ae);
            terms.push(-pipe_e * kpipe);
            terms.push(-comp_e * kc);
            ck.check("bal_e", name("bal_e", &[n, ht]), &terms, Cmp::Eq, dem);
            if let Some(c) = capt.get(n) {
                ck.check("ccs_capt", name("ccs_capt", &[n, ht]), &[kc, -c[t]], Cmp::Eq, 0.0);
                ck.check("ccs_pipe", name("ccs_pipe", &[n, ht]), &[kc, -kpipe], Cmp::Le, 0.0);
                ccs_annual.push(w[t] * kc);
            }
        }
    }
    if !capt.is_empty() {
        ck.check(
            "ccs_annual",
            "ccs_annual".into(),
            &ccs_annual,
            Cmp::Le,
            sys.ccs.annual_storage_cap_tons,
        );
    }
    ck.check("rps", "rps".into(), &[rps_lhs], Cmp::Ge, sc.rps_level * total_demand);

    // gas network
    let mut gbal: BTreeMap<&str, Vec<Vec<f64>>> = sys
        .ng_nodes
        .iter()
        .map(|k| (k.id.as_str(), vec![Vec::new(); DAYS]))
        .collect();
    let mut injected = 0.0;
    let mut e_gas = 0.0;
    for node in &sys.ng_nodes {
        let k = node.id.as_str();
        let lcdf_hi = if sc.lcdf_enabled { f64::INFINITY } else { 0.0 };
        for (day, dd) in days.iter().enumerate() {
            let dem = input.demand.gas[k][day];
            let g = ck.bound(&name("g", &[k, dd]), 0.0, f64::INFINITY)?;
            let a = ck.bound(&name("alcdf", &[k, dd]), 0.0, lcdf_hi)?;
            let s = ck.bound(&name("ag", &[k, dd]), 0.0, dem)?;
            gbal.get_mut(k).unwrap()[day].extend([g, a, s]);
            ck.check("supply", name("supply", &[k, dd]), &[g, a], Cmp::Le, node.injection_cap_mmbtu_per_day);
            add_cost(&mut costs, "ng_purchase", sc.ng_price * g);
            add_cost(&mut costs, "lcdf_purchase", sc.lcdf_price * a);
            add_cost(&mut costs, "gas_shed", sc.gas_shed_cost * s);
            injected += g;
            e_gas += eta_g * (dem - a - s);
        }
    }
    for l in &sys.pipelines {
        let z = if l.is_existing {
            None
        } else {
            let zn = name("zg", &[&l.id]);
            let z = ck.bound(&zn, 0.0, 1.0)?;
            ck.integral(&zn, z);
            add_cost(&mut costs, "pipeline_capex", ann(l.capex, l.lifetime_years)? * z);
            Some(z)
        };
        let hi = if l.is_existing {
            l.capacity_mmbtu_per_day
        } else {
            f64::INFINITY
        };
        for (day, dd) in days.iter().enumerate() {
            let f = ck.bound(&name("fg", &[&l.id, dd]), 0.0, hi)?;
            gbal.get_mut(l.from_node.as_str()).unwrap()[day].push(-f);
            gbal.get_mut(l.to_node.as_str()).unwrap()[day].push(f);
            if let Some(z) = z {
                ck.check(
                    "pipe_cand",
                    name("pipe_cand", &[&l.id, dd]),
                    &[f, -l.capacity_mmbtu_per_day * z],
                    Cmp::Le,
                    0.0,
                );
            }
        }
    }
    let mut draws: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut liq_in: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    let mut vpr_out: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    for node in &sys.ng_nodes {
        let k = node.id.as_str();
        for n in &node.adjacent_power_nodes {
            let mut fr = Vec::with_capacity(reps.len());
            for rr in &reps {
                fr.push(ck.bound(&name("fge", &[k, n, rr]), 0.0, f64::INFINITY)?);
            }
            for day in 0..DAYS {
                gbal.get_mut(k).unwrap()[day].push(-fr[grid.day_of[day]]);
            }
            let acc = draws.entry(n.as_str()).or_insert_with(|| vec![0.0; reps.len()]);
            for (a, f) in acc.iter_mut().zip(&fr) {
                *a += f;
            }
        }
        for j in &node.adjacent_svl_nodes {
            for (day, dd) in days.iter().enumerate() {
                let gl = ck.bound(&name("fgl", &[k, j, dd]), 0.0, f64::INFINITY)?;
                let vg = ck.bound(&name("fvg", &[j, k, dd]), 0.0, f64::INFINITY)?;
                gbal.get_mut(k).unwrap()[day].extend([vg, -gl]);
                liq_in.entry(j.as_str()).or_insert_with(|| vec![Vec::new(); DAYS])[day].push(gl);
                vpr_out.entry(j.as_str()).or_insert_with(|| vec![Vec::new(); DAYS])[day].push(vg);
            }
        }
    }
    for node in &sys.ng_nodes {
        let k = node.id.as_str();
        for (day, dd) in days.iter().enumerate() {
            let terms = std::mem::take(&mut gbal.get_mut(k).unwrap()[day]);
            ck.check("bal_g", name("bal_g", &[k, dd]), &terms, Cmp::Eq, input.demand.gas[k][day]);
        }
    }
    let mut svl_net = 0.0;
    for j in &sys.svl_nodes {
        let id = j.id.as_str();
        let xstr = ck.bound(&name("xstr", &[id]), 0.0, f64::INFINITY)?;
        let xvpr = ck.bound(&name("xvpr", &[id]), 0.0, f64::INFINITY)?;
        add_cost(
            &mut costs,
            "svl_inv_fom",
            ann(j.storage_capex_per_mmbtu, j.lifetime_years)? * xstr
                + ann(j.vapor_capex_per_mmbtu_per_day, j.lifetime_years)? * xvpr
                + j.storage_fom_per_mmbtu * (j.storage_cap_mmbtu + xstr)
                + j.vapor_fom_per_mmbtu_per_day * (j.vapor_cap_mmbtu_per_day + xvpr),
        );
        let mut sstr = Vec::with_capacity(DAYS);
        let mut sliq = Vec::with_capacity(DAYS);
        let mut svpr = Vec::with_capacity(DAYS);
        for dd in &days {
            sstr.push(ck.bound(&name("sstr", &[id, dd]), 0.0, f64::INFINITY)?);
            sliq.push(ck.bound(&name("sliq", &[id, dd]), 0.0, f64::INFINITY)?);
            svpr.push(ck.bound(&name("svpr", &[id, dd]), 0.0, f64::INFINITY)?);
        }
        let keep = 1.0 - j.boiloff_daily;
        for day in 0..DAYS {
            let dd = &days[day];
            let mut lq = liq_in.get(id).map_or_else(Vec::new, |v| v[day].clone());
            lq.push(-sliq[day]);
            ck.check("liq", name("liq", &[id, dd]), &lq, Cmp::Eq, 0.0);
            let mut vp = vpr_out.get(id).map_or_else(Vec::new, |v| v[day].clone());
            vp.push(-svpr[day]);
            ck.check("vpr", name("vpr", &[id, dd]), &vp, Cmp::Eq, 0.0);
            let before = match (day, sc.svl_cycle) {
                (0, SvlCycle::FixedInitial) => j.initial_storage_mmbtu,
                (0, SvlCycle::AnnualWrap) => sstr[DAYS - 1],
                _ => sstr[day - 1],
            };
            ck.check(
                "svl_bal",
                name("svl_bal", &[id, dd]),
                &[
                    sstr[day],
                    -keep * before,
                    -j.liq_charge_eff * sliq[day],
                    svpr[day] / j.vapor_discharge_eff,
                ],
                Cmp::Eq,
                0.0,
            );
            ck.check(
                "svl_vpr",
                name("svl_vpr", &[id, dd]),
                &[svpr[day], -xvpr],
                Cmp::Le,
                j.vapor_cap_mmbtu_per_day,
            );
            ck.check(
                "svl_str",
                name("svl_str", &[id, dd]),
                &[sstr[day], -xstr],
                Cmp::Le,
                j.storage_cap_mmbtu,
            );
            if sc.strict_liquefaction {
                ck.check("svl_liq", name("svl_liq", &[id, dd]), &[sliq[day]], Cmp::Le, j.liq_cap_mmbtu_per_day);
            }
            svl_net += svpr[day] - sliq[day];
        }
    }

    // coupling
    for node in &sys.power_nodes {
        let n = node.id.as_str();
        let burn = &fuel[n];
        let draw = draws.get(n);
        for (rep, rr) in reps.iter().enumerate() {
            let dv = draw.map_or(0.0, |v| v[rep]);
            ck.check("fuel", name("fuel", &[n, rr]), &[dv, -burn[rep]], Cmp::Eq, 0.0);
        }
    }
    let budget = sc.budget();
    let capped = match sc.emissions_scope {
        EmissionsScope::Joint => e_power + e_gas,
        EmissionsScope::PowerOnly => e_power,
    };
    ck.check("emis_cap", "emis_cap".into(), &[capped], Cmp::Le, budget);

    let fossil_route = eta_g * (injected + svl_net - captured_fuel);
    let ledger_gap = ((e_power + e_gas) - fossil_route).abs();
    let ledger_scale = (e_power + e_gas).abs().max(fossil_route.abs()).max(1.0);
    let mut report = ck.report;
    report.emissions = EmissionsCheck {
        power_tons: e_power,
        gas_tons: e_gas,
        budget_tons: budget,
        fossil_route_tons: fossil_route,
        ledger_gap,
        ledger_ok: ledger_gap <= REL_TOL * ledger_scale,
    };
    let total: f64 = costs.values().sum();
    report.objective_recomputed = total;
    report.objective_reported = sol.objective;
    report.objective_rel_gap = sol
        .objective
        .map_or(0.0, |o| (o - total).abs() / o.abs().max(total.abs()).max(1.0));
    report.objective_ok = report.objective_rel_gap <= REL_TOL;
    report.costs = costs;
    report.passed = report.violations.is_empty()
        && report.families.values().all(|f| f.failed == 0)
        && report.objective_ok
        && report.emissions.ledger_ok;
    Ok(report)
}

fn is_design_integer(var_name: &str) -> bool {
    ["xest[", "xdec[", "ze[", "zg["]
        .iter()
        .any(|p| var_name.starts_with(p))
}

/// Number of combinations of the investment integers, or an error if a bound is infinite.
pub fn integer_grid_size(model: &MilpModel) -> Result<u128, AuditError> {
    let mut size: u128 = 1;
    for v in model.variables() {
        if v.kind.is_integral() && is_design_integer(&v.name) {
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(AuditError::UnboundedInteger(v.name.clone()));
            }
            let levels = (v.upper.floor() - v.lower.ceil() + 1.0).max(0.0) as u128;
            size = size.saturating_mul(levels);
        }
    }
    Ok(size)
}

/// Enumerates every investment decision (builds, retirements, candidate lines
/// and pipelines), solves the remaining LP for each, and returns the best
/// objective; `None` when every combination is infeasible.
pub fn brute_force_optimum(
    input: ModelInput<'_>,
    solver: &dyn SolverAdapter,
) -> Result<Option<f64>, AuditError> {
    let model = build_model(input)?;
    let size = integer_grid_size(&model)?;
    if size > 10_000 {
        return Err(AuditError::GridTooLarge(size));
    }
    let design: Vec<_> = model
        .var_ids()
        .filter(|&id| {
            let v = model.var(id);
            v.kind.is_integral() && is_design_integer(&v.name)
        })
        .collect();
    let mut lp = model.clone();
    for id in lp.var_ids().collect::<Vec<_>>() {
        lp.set_kind(id, VarKind::Continuous);
    }
    let levels: Vec<(i64, i64)> = design
        .iter()
        .map(|&id| {
            let v = model.var(id);
            (v.lower.ceil() as i64, v.upper.floor() as i64)
        })
        .collect();
    let mut current: Vec<i64> = levels.iter().map(|l| l.0).collect();
    if levels.iter().any(|(lo, hi)| lo > hi) {
        return Ok(None);
    }
    let mut best: Option<f64> = None;
    loop {
        for (k, &id) in design.iter().enumerate() {
            lp.fix(id, current[k] as f64).map_err(BuildError::from)?;
        }
        let sol = solver.solve(&lp)?;
        if sol.status == SolveStatus::Optimal {
            if let Some(o) = sol.objective {
                best = Some(best.map_or(o, |b: f64| b.min(o)));
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == current.len() {
                return Ok(best);
            }
            if current[k] < levels[k].1 {
                current[k] += 1;
                break;
            }
            current[k] = levels[k].0;
            k += 1;
        }
    }
}
