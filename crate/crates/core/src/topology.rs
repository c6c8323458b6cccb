//! Typed power / gas / SVL network and techno-economic parameters.
//!
//! Every entity list is kept sorted by id so that index order is canonical
//! and model construction is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csvio::{read_rows, split_list, write_rows_or_header};
use crate::error::TopologyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fuel {
    GasFired,
    Uranium,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantType {
    pub id: String,
    pub is_existing: bool,
    pub fuel: Fuel,
    pub is_vre: bool,
    pub is_thermal_uc: bool,
    pub has_ccs: bool,
    /// `false` for plants whose retirement is not modelled (hydro).
    pub retirable: bool,
    pub nameplate_mw: f64,
    pub min_stable_frac: f64,
    pub ramp_frac: f64,
    pub heat_rate_mmbtu_per_mwh: f64,
    pub capture_rate: f64,
    pub capex_per_plant: f64,
    pub fom_per_plant: f64,
    pub vom_per_mwh: f64,
    pub startup_cost: f64,
    pub decom_cost_per_plant: f64,
    /// $/MMBtu for fuels not bought through the gas network.
    pub fuel_price: f64,
    pub lifetime_years: f64,
    pub resource_class: Option<String>,
}

impl PlantType {
    pub fn is_gas_fired(&self) -> bool {
        self.fuel == Fuel::GasFired
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageType {
    pub id: String,
    pub is_long_duration: bool,
    pub energy_capex_per_mwh: f64,
    pub power_capex_per_mw: f64,
    pub energy_fom_per_mwh_yr: f64,
    pub power_fom_per_mw_yr: f64,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    pub hourly_self_discharge: f64,
    pub lifetime_years: f64,
}

/// A plant type allowed at a power node, with its existing fleet size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSite {
    pub node: String,
    pub plant_type: String,
    pub existing_count: u32,
    /// Upper bound on new builds; unbounded when absent.
    pub max_new: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerNode {
    pub id: String,
    pub state: String,
    pub co2_distance_miles: f64,
    pub storage_types: Vec<String>,
    pub adjacent_gas_nodes: Vec<String>,
    pub capex_multipliers: BTreeMap<String, f64>,
}

impl PowerNode {
    pub fn multiplier(&self, plant_type: &str) -> f64 {
        self.capex_multipliers
            .get(plant_type)
            .copied()
            .unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionLine {
    pub id: String,
    pub node_a: String,
    pub node_b: String,
    pub is_existing: bool,
    pub capacity_mw: f64,
    pub susceptance: f64,
    pub length_miles: f64,
    /// Crude (unannualized) investment cost; zero for existing lines.
    pub capex: f64,
    pub lifetime_years: f64,
}

impl TransmissionLine {
    /// Endpoints ordered so that `lo < hi`.
    pub fn ordered(&self) -> (&str, &str) {
        if self.node_a < self.node_b {
            (&self.node_a, &self.node_b)
        } else {
            (&self.node_b, &self.node_a)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgNode {
    pub id: String,
    pub injection_cap_mmbtu_per_day: f64,
    pub adjacent_svl_nodes: Vec<String>,
    pub adjacent_power_nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pipeline {
    pub id: String,
    pub from_node: String,
    pub to_node: String,
    pub is_existing: bool,
    pub capacity_mmbtu_per_day: f64,
    pub length_miles: f64,
    pub capex: f64,
    pub lifetime_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvlNode {
    pub id: String,
    pub storage_cap_mmbtu: f64,
    pub vapor_cap_mmbtu_per_day: f64,
    pub liq_cap_mmbtu_per_day: f64,
    pub storage_capex_per_mmbtu: f64,
    pub vapor_capex_per_mmbtu_per_day: f64,
    pub storage_fom_per_mmbtu: f64,
    pub vapor_fom_per_mmbtu_per_day: f64,
    pub liq_charge_eff: f64,
    pub vapor_discharge_eff: f64,
    pub boiloff_daily: f64,
    pub lifetime_years: f64,
    /// Inventory at the start of the year; only read by the fixed-initial cycle option.
    pub initial_storage_mmbtu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcsParams {
    pub annual_storage_cap_tons: f64,
    pub pipe_capex_per_mile_ton: f64,
    pub storage_cost_per_ton: f64,
    pub pipe_elec_mwh_per_mile_ton_h: f64,
    pub pump_elec_mwh_per_ton_h: f64,
    pub compressor_spacing_miles: f64,
}

impl CcsParams {
    /// Number of compressor pumps on the CO2 line from a node (`d_n / spacing`).
    pub fn compressors(&self, distance_miles: f64) -> f64 {
        if self.compressor_spacing_miles > 0.0 {
            distance_miles / self.compressor_spacing_miles
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySystem {
    pub power_nodes: Vec<PowerNode>,
    pub lines: Vec<TransmissionLine>,
    pub plant_types: Vec<PlantType>,
    pub plant_sites: Vec<PlantSite>,
    pub storage_types: Vec<StorageType>,
    pub ng_nodes: Vec<NgNode>,
    pub pipelines: Vec<Pipeline>,
    pub svl_nodes: Vec<SvlNode>,
    pub ccs: CcsParams,
    pub resource_limits: BTreeMap<String, f64>,
}

/// Annuity factor times `capex`: `capex * w / (1 - (1 + w)^-lt)`.
pub fn annualize(capex: f64, lifetime_years: f64, rate: f64) -> Result<f64, TopologyError> {
    if !(rate > 0.0) {
        return Err(TopologyError::NonPositiveRate(rate));
    }
    if !(lifetime_years >= 1.0) {
        return Err(TopologyError::Invalid(format!(
            "lifetime must be at least one year, got {lifetime_years}"
        )));
    }
    Ok(capex * rate / (1.0 - (1.0 + rate).powf(-lifetime_years)))
}

/// Annualized capex of one plant at a node, regional multiplier applied.
pub fn effective_plant_capex(
    plant: &PlantType,
    node: &PowerNode,
    rate: f64,
) -> Result<f64, TopologyError> {
    Ok(annualize(plant.capex_per_plant, plant.lifetime_years, rate)? * node.multiplier(&plant.id))
}

// ---- file rows -------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerNodeRow {
    id: String,
    state: String,
    co2_distance_miles: f64,
    storage_types: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NgNodeRow {
    id: String,
    injection_cap_mmbtu_per_day: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineRow {
    id: String,
    from_node: String,
    to_node: String,
    is_existing: bool,
    capacity_mmbtu_per_day: Option<f64>,
    length_miles: f64,
    capex: f64,
    lifetime_years: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitRow {
    class: String,
    cap_mw: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplierRow {
    node: String,
    plant_type: String,
    multiplier: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeRow {
    ng_node: String,
    power_node: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GsRow {
    ng_node: String,
    svl_node: String,
}

pub const SYSTEM_FILES: [&str; 13] = [
    "power_nodes.csv",
    "plants.csv",
    "plant_sites.csv",
    "lines.csv",
    "ng_nodes.csv",
    "pipelines.csv",
    "svl.csv",
    "storage_types.csv",
    "resource_limits.csv",
    "multipliers.csv",
    "ccs.csv",
    "adjacency_ge.csv",
    "adjacency_gs.csv",
];

fn missing(id: &str, context: impl Into<String>) -> TopologyError {
    TopologyError::MissingReference {
        id: id.to_string(),
        context: context.into(),
    }
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>, what: &str) -> Result<(), TopologyError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(TopologyError::Invalid(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

fn check_frac(v: f64, what: String) -> Result<(), TopologyError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(TopologyError::Invalid(format!("{what} = {v} is outside [0, 1]")))
    }
}

fn check_eff(v: f64, what: String) -> Result<(), TopologyError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(TopologyError::Invalid(format!("{what} = {v} is outside (0, 1]")))
    }
}

fn check_nonneg(v: f64, what: String) -> Result<(), TopologyError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TopologyError::Invalid(format!("{what} = {v} must be finite and non-negative")))
    }
}

/// Loads and cross-validates a system directory.
pub fn load_system(dir: &Path) -> Result<EnergySystem, TopologyError> {
    let p = |f: &str| dir.join(f);
    let node_rows: Vec<PowerNodeRow> = read_rows(&p("power_nodes.csv"))?;
    let plant_types: Vec<PlantType> = read_rows(&p("plants.csv"))?;
    let plant_sites: Vec<PlantSite> = read_rows(&p("plant_sites.csv"))?;
    let lines: Vec<TransmissionLine> = read_rows(&p("lines.csv"))?;
    let ng_rows: Vec<NgNodeRow> = read_rows(&p("ng_nodes.csv"))?;
    let pipe_rows: Vec<PipelineRow> = read_rows(&p("pipelines.csv"))?;
    let svl_nodes: Vec<SvlNode> = read_rows(&p("svl.csv"))?;
    let storage_types: Vec<StorageType> = read_rows(&p("storage_types.csv"))?;
    let limits: Vec<LimitRow> = read_rows(&p("resource_limits.csv"))?;
    let mults: Vec<MultiplierRow> = read_rows(&p("multipliers.csv"))?;
    let ccs_rows: Vec<CcsParams> = read_rows(&p("ccs.csv"))?;
    let ge: Vec<GeRow> = read_rows(&p("adjacency_ge.csv"))?;
    let gs: Vec<GsRow> = read_rows(&p("adjacency_gs.csv"))?;

    let ccs = match ccs_rows.as_slice() {
        [one] => one.clone(),
        _ => {
            return Err(TopologyError::SchemaViolation {
                file: "ccs.csv".into(),
                row: 2,
                msg: format!("expected exactly one data row, found {}", ccs_rows.len()),
            })
        }
    };

    // candidate pipelines without a capacity get the mean existing capacity
    let existing_caps: Vec<f64> = pipe_rows
        .iter()
        .filter(|r| r.is_existing)
        .filter_map(|r| r.capacity_mmbtu_per_day)
        .collect();
    let mean_cap = if existing_caps.is_empty() {
        None
    } else {
        Some(existing_caps.iter().sum::<f64>() / existing_caps.len() as f64)
    };
    let mut pipelines = Vec::with_capacity(pipe_rows.len());
    for (i, r) in pipe_rows.into_iter().enumerate() {
        let cap = match (r.capacity_mmbtu_per_day, r.is_existing) {
            (Some(c), _) => c,
            (None, false) => mean_cap.ok_or_else(|| TopologyError::SchemaViolation {
                file: "pipelines.csv".into(),
                row: i as u64 + 2,
                msg: "candidate capacity missing and no existing pipeline to average".into(),
            })?,
            (None, true) => {
                return Err(TopologyError::SchemaViolation {
                    file: "pipelines.csv".into(),
                    row: i as u64 + 2,
                    msg: "existing pipeline needs a capacity".into(),
                })
            }
        };
        pipelines.push(Pipeline {
            id: r.id,
            from_node: r.from_node,
            to_node: r.to_node,
            is_existing: r.is_existing,
            capacity_mmbtu_per_day: cap,
            length_miles: r.length_miles,
            capex: r.capex,
            lifetime_years: r.lifetime_years,
        });
    }

    let mut power_nodes: Vec<PowerNode> = node_rows
        .into_iter()
        .map(|r| {
            let mut st = split_list(r.storage_types.as_deref().unwrap_or(""));
            st.sort();
            PowerNode {
                id: r.id,
                state: r.state,
                co2_distance_miles: r.co2_distance_miles,
                storage_types: st,
                adjacent_gas_nodes: Vec::new(),
                capex_multipliers: BTreeMap::new(),
            }
        })
        .collect();
    let mut ng_nodes: Vec<NgNode> = ng_rows
        .into_iter()
        .map(|r| NgNode {
            id: r.id,
            injection_cap_mmbtu_per_day: r.injection_cap_mmbtu_per_day,
            adjacent_svl_nodes: Vec::new(),
            adjacent_power_nodes: Vec::new(),
        })
        .collect();

    power_nodes.sort_by(|a, b| a.id.cmp(&b.id));
    ng_nodes.sort_by(|a, b| a.id.cmp(&b.id));
    unique_ids(power_nodes.iter().map(|n| n.id.as_str()), "power node")?;
    unique_ids(ng_nodes.iter().map(|n| n.id.as_str()), "NG node")?;
    unique_ids(svl_nodes.iter().map(|n| n.id.as_str()), "SVL node")?;

    let pidx: HashMap<String, usize> = power_nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.clone(), i))
        .collect();
    let gidx: HashMap<String, usize> = ng_nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.clone(), i))
        .collect();
    let svl_ids: BTreeSet<&str> = svl_nodes.iter().map(|s| s.id.as_str()).collect();

    for r in &ge {
        let k = *gidx
            .get(&r.ng_node)
            .ok_or_else(|| missing(&r.ng_node, "adjacency_ge.csv"))?;
        let n = *pidx
            .get(&r.power_node)
            .ok_or_else(|| missing(&r.power_node, "adjacency_ge.csv"))?;
        ng_nodes[k].adjacent_power_nodes.push(r.power_node.clone());
        power_nodes[n].adjacent_gas_nodes.push(r.ng_node.clone());
    }
    for r in &gs {
        let k = *gidx
            .get(&r.ng_node)
            .ok_or_else(|| missing(&r.ng_node, "adjacency_gs.csv"))?;
        if !svl_ids.contains(r.svl_node.as_str()) {
            return Err(missing(&r.svl_node, "adjacency_gs.csv"));
        }
        ng_nodes[k].adjacent_svl_nodes.push(r.svl_node.clone());
    }
    for m in mults {
        let n = *pidx
            .get(&m.node)
            .ok_or_else(|| missing(&m.node, "multipliers.csv"))?;
        if !plant_types.iter().any(|p| p.id == m.plant_type) {
            return Err(missing(&m.plant_type, "multipliers.csv"));
        }
        power_nodes[n].capex_multipliers.insert(m.plant_type, m.multiplier);
    }

    let resource_limits = limits.into_iter().map(|r| (r.class, r.cap_mw)).collect();
    let sys = EnergySystem {
        power_nodes,
        lines,
        plant_types,
        plant_sites,
        storage_types,
        ng_nodes,
        pipelines,
        svl_nodes,
        ccs,
        resource_limits,
    };
    sys.canonicalize().validated()
}

impl EnergySystem {
    /// Sorts every entity list and adjacency list by id.
    pub fn canonicalize(mut self) -> Self {
        self.power_nodes.sort_by(|a, b| a.id.cmp(&b.id));
        for n in &mut self.power_nodes {
            n.storage_types.sort();
            n.storage_types.dedup();
            n.adjacent_gas_nodes.sort();
            n.adjacent_gas_nodes.dedup();
        }
        self.ng_nodes.sort_by(|a, b| a.id.cmp(&b.id));
        for k in &mut self.ng_nodes {
            k.adjacent_power_nodes.sort();
            k.adjacent_power_nodes.dedup();
            k.adjacent_svl_nodes.sort();
            k.adjacent_svl_nodes.dedup();
        }
        self.lines.sort_by(|a, b| a.id.cmp(&b.id));
        self.plant_types.sort_by(|a, b| a.id.cmp(&b.id));
        self.plant_sites
            .sort_by(|a, b| (&a.node, &a.plant_type).cmp(&(&b.node, &b.plant_type)));
        self.storage_types.sort_by(|a, b| a.id.cmp(&b.id));
        self.pipelines.sort_by(|a, b| a.id.cmp(&b.id));
        self.svl_nodes.sort_by(|a, b| a.id.cmp(&b.id));
        self
    }

    /// Checks referential closure and entity invariants.
    pub fn validated(self) -> Result<Self, TopologyError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        unique_ids(self.power_nodes.iter().map(|n| n.id.as_str()), "power node")?;
        unique_ids(self.ng_nodes.iter().map(|n| n.id.as_str()), "NG node")?;
        unique_ids(self.svl_nodes.iter().map(|n| n.id.as_str()), "SVL node")?;
        unique_ids(self.lines.iter().map(|n| n.id.as_str()), "line")?;
        unique_ids(self.pipelines.iter().map(|n| n.id.as_str()), "pipeline")?;
        unique_ids(self.plant_types.iter().map(|n| n.id.as_str()), "plant type")?;
        unique_ids(self.storage_types.iter().map(|n| n.id.as_str()), "storage type")?;

        for p in &self.plant_types {
            if !(p.nameplate_mw > 0.0) {
                return Err(TopologyError::NonPositiveCapacity(format!("plant type {}", p.id)));
            }
            check_frac(p.min_stable_frac, format!("{}.min_stable_frac", p.id))?;
            check_frac(p.ramp_frac, format!("{}.ramp_frac", p.id))?;
            check_frac(p.capture_rate, format!("{}.capture_rate", p.id))?;
            for (v, f) in [
                (p.heat_rate_mmbtu_per_mwh, "heat_rate_mmbtu_per_mwh"),
                (p.capex_per_plant, "capex_per_plant"),
                (p.fom_per_plant, "fom_per_plant"),
                (p.vom_per_mwh, "vom_per_mwh"),
                (p.startup_cost, "startup_cost"),
                (p.decom_cost_per_plant, "decom_cost_per_plant"),
                (p.fuel_price, "fuel_price"),
            ] {
                check_nonneg(v, format!("{}.{f}", p.id))?;
            }
            if !(p.lifetime_years >= 1.0) {
                return Err(TopologyError::Invalid(format!("{}.lifetime_years < 1", p.id)));
            }
            if p.has_ccs && p.fuel != Fuel::GasFired {
                return Err(TopologyError::Invalid(format!(
                    "{} has CCS but is not gas-fired",
                    p.id
                )));
            }
            if p.is_vre && (p.heat_rate_mmbtu_per_mwh != 0.0 || p.is_thermal_uc) {
                return Err(TopologyError::Invalid(format!(
                    "VRE plant {} must have zero heat rate and no unit commitment",
                    p.id
                )));
            }
        }
        for s in &self.storage_types {
            check_eff(s.charge_eff, format!("{}.charge_eff", s.id))?;
            check_eff(s.discharge_eff, format!("{}.discharge_eff", s.id))?;
            if !(0.0..1.0).contains(&s.hourly_self_discharge) {
                return Err(TopologyError::Invalid(format!(
                    "{}.hourly_self_discharge outside [0, 1)",
                    s.id
                )));
            }
            for (v, f) in [
                (s.energy_capex_per_mwh, "energy_capex_per_mwh"),
                (s.power_capex_per_mw, "power_capex_per_mw"),
                (s.energy_fom_per_mwh_yr, "energy_fom_per_mwh_yr"),
                (s.power_fom_per_mw_yr, "power_fom_per_mw_yr"),
            ] {
                check_nonneg(v, format!("{}.{f}", s.id))?;
            }
        }

        let node_ids: BTreeSet<&str> = self.power_nodes.iter().map(|n| n.id.as_str()).collect();
        let ng_ids: BTreeSet<&str> = self.ng_nodes.iter().map(|n| n.id.as_str()).collect();
        let svl_ids: BTreeSet<&str> = self.svl_nodes.iter().map(|n| n.id.as_str()).collect();
        let storage_ids: BTreeSet<&str> =
            self.storage_types.iter().map(|n| n.id.as_str()).collect();
        let plants: HashMap<&str, &PlantType> =
            self.plant_types.iter().map(|p| (p.id.as_str(), p)).collect();

        for n in &self.power_nodes {
            check_nonneg(n.co2_distance_miles, format!("{}.co2_distance_miles", n.id))?;
            for s in &n.storage_types {
                if !storage_ids.contains(s.as_str()) {
                    return Err(missing(s, format!("storage types of power node {}", n.id)));
                }
            }
            for k in &n.adjacent_gas_nodes {
                if !ng_ids.contains(k.as_str()) {
                    return Err(missing(k, format!("gas adjacency of power node {}", n.id)));
                }
            }
            for (p, m) in &n.capex_multipliers {
                if !plants.contains_key(p.as_str()) {
                    return Err(missing(p, format!("multipliers of {}", n.id)));
                }
                check_nonneg(*m, format!("multiplier {}/{p}", n.id))?;
            }
        }
        let mut site_keys = BTreeSet::new();
        for s in &self.plant_sites {
            if !node_ids.contains(s.node.as_str()) {
                return Err(missing(&s.node, "plant_sites.csv"));
            }
            let p = plants
                .get(s.plant_type.as_str())
                .ok_or_else(|| missing(&s.plant_type, "plant_sites.csv"))?;
            if !site_keys.insert((s.node.as_str(), s.plant_type.as_str())) {
                return Err(TopologyError::Invalid(format!(
                    "duplicate plant site {}/{}",
                    s.node, s.plant_type
                )));
            }
            if !p.is_existing && s.existing_count > 0 {
                return Err(TopologyError::Invalid(format!(
                    "new plant type {} has existing units at {}",
                    p.id, s.node
                )));
            }
            if p.is_gas_fired() {
                let node = self.power_nodes.iter().find(|n| n.id == s.node).unwrap();
                if node.adjacent_gas_nodes.is_empty() {
                    return Err(TopologyError::Invalid(format!(
                        "power node {} hosts gas-fired {} but has no adjacent NG node",
                        s.node, p.id
                    )));
                }
            }
        }
        for l in &self.lines {
            for e in [&l.node_a, &l.node_b] {
                if !node_ids.contains(e.as_str()) {
                    return Err(missing(e, format!("line {}", l.id)));
                }
            }
            if l.node_a == l.node_b {
                return Err(TopologyError::Invalid(format!("line {} is a self-loop", l.id)));
            }
            if !(l.capacity_mw > 0.0) {
                return Err(TopologyError::NonPositiveCapacity(format!("line {}", l.id)));
            }
            if !(l.susceptance > 0.0) {
                return Err(TopologyError::Invalid(format!("line {} susceptance <= 0", l.id)));
            }
            check_nonneg(l.capex, format!("line {} capex", l.id))?;
            if !l.is_existing && !(l.lifetime_years >= 1.0) {
                return Err(TopologyError::Invalid(format!("line {} lifetime < 1", l.id)));
            }
        }
        for k in &self.ng_nodes {
            check_nonneg(k.injection_cap_mmbtu_per_day, format!("{}.injection_cap", k.id))?;
            for n in &k.adjacent_power_nodes {
                if !node_ids.contains(n.as_str()) {
                    return Err(missing(n, format!("power adjacency of NG node {}", k.id)));
                }
            }
            for j in &k.adjacent_svl_nodes {
                if !svl_ids.contains(j.as_str()) {
                    return Err(missing(j, format!("SVL adjacency of NG node {}", k.id)));
                }
            }
        }
        for l in &self.pipelines {
            for e in [&l.from_node, &l.to_node] {
                if !ng_ids.contains(e.as_str()) {
                    return Err(missing(e, format!("pipeline {}", l.id)));
                }
            }
            if l.from_node == l.to_node {
                return Err(TopologyError::Invalid(format!("pipeline {} is a self-loop", l.id)));
            }
            if !(l.capacity_mmbtu_per_day > 0.0) {
                return Err(TopologyError::NonPositiveCapacity(format!("pipeline {}", l.id)));
            }
            check_nonneg(l.capex, format!("pipeline {} capex", l.id))?;
            if !l.is_existing && !(l.lifetime_years >= 1.0) {
                return Err(TopologyError::Invalid(format!("pipeline {} lifetime < 1", l.id)));
            }
        }
        for j in &self.svl_nodes {
            for (v, f) in [
                (j.storage_cap_mmbtu, "storage_cap_mmbtu"),
                (j.vapor_cap_mmbtu_per_day, "vapor_cap_mmbtu_per_day"),
                (j.liq_cap_mmbtu_per_day, "liq_cap_mmbtu_per_day"),
                (j.storage_capex_per_mmbtu, "storage_capex_per_mmbtu"),
                (j.vapor_capex_per_mmbtu_per_day, "vapor_capex_per_mmbtu_per_day"),
                (j.storage_fom_per_mmbtu, "storage_fom_per_mmbtu"),
                (j.vapor_fom_per_mmbtu_per_day, "vapor_fom_per_mmbtu_per_day"),
                (j.initial_storage_mmbtu, "initial_storage_mmbtu"),
            ] {
                check_nonneg(v, format!("{}.{f}", j.id))?;
            }
            check_eff(j.liq_charge_eff, format!("{}.liq_charge_eff", j.id))?;
            check_eff(j.vapor_discharge_eff, format!("{}.vapor_discharge_eff", j.id))?;
            if !(0.0..1.0).contains(&j.boiloff_daily) {
                return Err(TopologyError::Invalid(format!("{}.boiloff_daily outside [0, 1)", j.id)));
            }
        }
        let c = &self.ccs;
        for (v, f) in [
            (c.annual_storage_cap_tons, "annual_storage_cap_tons"),
            (c.pipe_capex_per_mile_ton, "pipe_capex_per_mile_ton"),
            (c.storage_cost_per_ton, "storage_cost_per_ton"),
            (c.pipe_elec_mwh_per_mile_ton_h, "pipe_elec_mwh_per_mile_ton_h"),
            (c.pump_elec_mwh_per_ton_h, "pump_elec_mwh_per_ton_h"),
            (c.compressor_spacing_miles, "compressor_spacing_miles"),
        ] {
            check_nonneg(v, format!("ccs.{f}"))?;
        }
        for (class, cap) in &self.resource_limits {
            check_nonneg(*cap, format!("resource limit {class}"))?;
        }
        Ok(())
    }

    pub fn power_node(&self, id: &str) -> Option<&PowerNode> {
        self.power_nodes.iter().find(|n| n.id == id)
    }

    pub fn plant_type(&self, id: &str) -> Option<&PlantType> {
        self.plant_types.iter().find(|p| p.id == id)
    }

    pub fn storage_type(&self, id: &str) -> Option<&StorageType> {
        self.storage_types.iter().find(|s| s.id == id)
    }

    /// Lexicographically smallest power node id.
    pub fn reference_node(&self) -> Option<&str> {
        self.power_nodes.first().map(|n| n.id.as_str())
    }

    /// Writes the system in the same schema [`load_system`] reads.
    pub fn write(&self, dir: &Path) -> Result<(), TopologyError> {
        std::fs::create_dir_all(dir).map_err(|e| TopologyError::from((dir.to_path_buf(), e)))?;
        let p = |f: &str| dir.join(f);
        let nodes: Vec<PowerNodeRow> = self
            .power_nodes
            .iter()
            .map(|n| PowerNodeRow {
                id: n.id.clone(),
                state: n.state.clone(),
                co2_distance_miles: n.co2_distance_miles,
                storage_types: Some(n.storage_types.join(";")),
            })
            .collect();
        write_rows_or_header(
            &p("power_nodes.csv"),
            &nodes,
            &["id", "state", "co2_distance_miles", "storage_types"],
        )?;
        write_rows_or_header(&p("plants.csv"), &self.plant_types, &PLANT_HEADER)?;
        write_rows_or_header(
            &p("plant_sites.csv"),
            &self.plant_sites,
            &["node", "plant_type", "existing_count", "max_new"],
        )?;
        write_rows_or_header(&p("lines.csv"), &self.lines, &LINE_HEADER)?;
        let ng: Vec<NgNodeRow> = self
            .ng_nodes
            .iter()
            .map(|k| NgNodeRow {
                id: k.id.clone(),
                injection_cap_mmbtu_per_day: k.injection_cap_mmbtu_per_day,
            })
            .collect();
        write_rows_or_header(&p("ng_nodes.csv"), &ng, &["id", "injection_cap_mmbtu_per_day"])?;
        write_rows_or_header(&p("pipelines.csv"), &self.pipelines, &PIPE_HEADER)?;
        write_rows_or_header(&p("svl.csv"), &self.svl_nodes, &SVL_HEADER)?;
        write_rows_or_header(&p("storage_types.csv"), &self.storage_types, &STORAGE_HEADER)?;
        let limits: Vec<LimitRow> = self
            .resource_limits
            .iter()
            .map(|(c, v)| LimitRow {
                class: c.clone(),
                cap_mw: *v,
            })
            .collect();
        write_rows_or_header(&p("resource_limits.csv"), &limits, &["class", "cap_mw"])?;
        let mults: Vec<MultiplierRow> = self
            .power_nodes
            .iter()
            .flat_map(|n| {
                n.capex_multipliers.iter().map(|(t, m)| MultiplierRow {
                    node: n.id.clone(),
                    plant_type: t.clone(),
                    multiplier: *m,
                })
            })
            .collect();
        write_rows_or_header(
            &p("multipliers.csv"),
            &mults,
            &["node", "plant_type", "multiplier"],
        )?;
        write_rows_or_header(&p("ccs.csv"), std::slice::from_ref(&self.ccs), &[])?;
        let ge: Vec<GeRow> = self
            .ng_nodes
            .iter()
            .flat_map(|k| {
                k.adjacent_power_nodes.iter().map(|n| GeRow {
                    ng_node: k.id.clone(),
                    power_node: n.clone(),
                })
            })
            .collect();
        write_rows_or_header(&p("adjacency_ge.csv"), &ge, &["ng_node", "power_node"])?;
        let gs: Vec<GsRow> = self
            .ng_nodes
            .iter()
            .flat_map(|k| {
                k.adjacent_svl_nodes.iter().map(|j| GsRow {
                    ng_node: k.id.clone(),
                    svl_node: j.clone(),
                })
            })
            .collect();
        write_rows_or_header(&p("adjacency_gs.csv"), &gs, &["ng_node", "svl_node"])?;
        Ok(())
    }
}

const PLANT_HEADER: [&str; 20] = [
    "id",
    "is_existing",
    "fuel",
    "is_vre",
    "is_thermal_uc",
    "has_ccs",
    "retirable",
    "nameplate_mw",
    "min_stable_frac",
    "ramp_frac",
    "heat_rate_mmbtu_per_mwh",
    "capture_rate",
    "capex_per_plant",
    "fom_per_plant",
    "vom_per_mwh",
    "startup_cost",
    "decom_cost_per_plant",
    "fuel_price",
    "lifetime_years",
    "resource_class",
];

const LINE_HEADER: [&str; 9] = [
    "id",
    "node_a",
    "node_b",
    "is_existing",
    "capacity_mw",
    "susceptance",
    "length_miles",
    "capex",
    "lifetime_years",
];

const PIPE_HEADER: [&str; 8] = [
    "id",
    "from_node",
    "to_node",
    "is_existing",
    "capacity_mmbtu_per_day",
    "length_miles",
    "capex",
    "lifetime_years",
];

const SVL_HEADER: [&str; 13] = [
    "id",
    "storage_cap_mmbtu",
    "vapor_cap_mmbtu_per_day",
    "liq_cap_mmbtu_per_day",
    "storage_capex_per_mmbtu",
    "vapor_capex_per_mmbtu_per_day",
    "storage_fom_per_mmbtu",
    "vapor_fom_per_mmbtu_per_day",
    "liq_charge_eff",
    "vapor_discharge_eff",
    "boiloff_daily",
    "lifetime_years",
    "initial_storage_mmbtu",
];

const STORAGE_HEADER: [&str; 10] = [
    "id",
    "is_long_duration",
    "energy_capex_per_mwh",
    "power_capex_per_mw",
    "energy_fom_per_mwh_yr",
    "power_fom_per_mw_yr",
    "charge_eff",
    "discharge_eff",
    "hourly_self_discharge",
    "lifetime_years",
];
