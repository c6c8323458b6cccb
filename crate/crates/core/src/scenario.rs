//! Scenario definitions, demand sets and emissions budgets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::csvio::{read_rows, write_rows};
use crate::error::ScenarioError;
use crate::timegrid::{DAYS, HOURS};
use crate::topology::StorageType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    C1,
    C2,
    C3,
    C3a,
    C3b,
}

impl Case {
    pub const ALL: [Case; 5] = [Case::C1, Case::C2, Case::C3, Case::C3a, Case::C3b];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::C1 => "C1",
            Case::C2 => "C2",
            Case::C3 => "C3",
            Case::C3a => "C3a",
            Case::C3b => "C3b",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Case::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ScenarioError::Invalid(format!("unknown case `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionsScope {
    PowerOnly,
    Joint,
}

/// How a budget is derived from ζ when no explicit cap is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    /// `ζ · U`, consistent with the published budget table.
    Table,
    /// `(1 − ζ) · U`.
    Equation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvlCycle {
    /// Day-0 inventory equals day-365 inventory.
    AnnualWrap,
    /// Day-0 inventory is each SVL node's `initial_storage_mmbtu`.
    FixedInitial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub case: Case,
    pub emissions_scope: EmissionsScope,
    pub lcdf_enabled: bool,
    pub ldes_enabled: bool,
    /// Restricts LDES to one storage type; all long-duration types when absent.
    pub ldes_storage_type: Option<String>,
    pub zeta: f64,
    pub budget_rule: BudgetRule,
    pub emissions_budget_tons: Option<f64>,
    pub baseline_e_tons: f64,
    pub baseline_g_tons: f64,
    pub rps_level: f64,
    pub ng_price: f64,
    pub lcdf_price: f64,
    pub elec_shed_cost: f64,
    pub gas_shed_cost: f64,
    pub emission_factor: f64,
    pub discount_rate: f64,
    /// Global big-M for candidate lines; per-line `U + 2πb` when absent.
    pub big_m: Option<f64>,
    pub strict_liquefaction: bool,
    pub svl_cycle: SvlCycle,
    pub demand: String,
    pub rep_days: usize,
    pub seed: u64,
    pub mip_gap: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "base".into(),
            case: Case::C3,
            emissions_scope: EmissionsScope::Joint,
            lcdf_enabled: true,
            ldes_enabled: false,
            ldes_storage_type: None,
            zeta: 0.8,
            budget_rule: BudgetRule::Table,
            emissions_budget_tons: None,
            baseline_e_tons: 43.9e6,
            baseline_g_tons: 23.6e6,
            rps_level: 0.5,
            ng_price: 5.45,
            lcdf_price: 20.0,
            elec_shed_cost: 10_000.0,
            gas_shed_cost: 1_000.0,
            emission_factor: 0.053,
            discount_rate: 0.071,
            big_m: None,
            strict_liquefaction: false,
            svl_cycle: SvlCycle::AnnualWrap,
            demand: "BAU".into(),
            rep_days: crate::timegrid::DEFAULT_REP_DAYS,
            seed: 0,
            mip_gap: 0.01,
        }
    }
}

impl Scenario {
    pub fn for_case(case: Case) -> Self {
        let mut s = Self::default();
        s.apply_case(case);
        s
    }

    /// Sets the case label and its technology flags.
    pub fn apply_case(&mut self, case: Case) {
        self.case = case;
        let (scope, lcdf, ldes) = match case {
            Case::C1 => (EmissionsScope::PowerOnly, false, None),
            Case::C2 => (EmissionsScope::Joint, false, None),
            Case::C3 => (EmissionsScope::Joint, true, None),
            Case::C3a => (EmissionsScope::Joint, true, Some("metal-air-low")),
            Case::C3b => (EmissionsScope::Joint, true, Some("metal-air-high")),
        };
        self.emissions_scope = scope;
        self.lcdf_enabled = lcdf;
        self.ldes_enabled = ldes.is_some();
        self.ldes_storage_type = ldes.map(str::to_string);
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if !(0.0..=1.0).contains(&self.zeta) {
            return bad(format!("zeta {} outside [0, 1]", self.zeta));
        }
        if !(0.0..=1.0).contains(&self.rps_level) {
            return bad(format!("rps_level {} outside [0, 1]", self.rps_level));
        }
        for (v, n) in [
            (self.ng_price, "ng_price"),
            (self.lcdf_price, "lcdf_price"),
            (self.elec_shed_cost, "elec_shed_cost"),
            (self.gas_shed_cost, "gas_shed_cost"),
            (self.emission_factor, "emission_factor"),
            (self.baseline_e_tons, "baseline_e_tons"),
            (self.baseline_g_tons, "baseline_g_tons"),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{n} must be finite and non-negative"));
            }
        }
        if !(self.discount_rate > 0.0) {
            return bad("discount_rate must be positive".into());
        }
        if !(self.budget() > 0.0) {
            return bad(format!("emissions budget {} must be positive", self.budget()));
        }
        if let Some(m) = self.big_m {
            if !(m > 0.0 && m.is_finite()) {
                return bad("big_m must be positive".into());
            }
        }
        if !(self.mip_gap >= 0.0) {
            return bad("mip_gap must be non-negative".into());
        }
        if self.rep_days == 0 || self.rep_days > DAYS {
            return bad(format!("rep_days {} outside 1..=365", self.rep_days));
        }
        Ok(())
    }

    pub fn budget(&self) -> f64 {
        emissions_budget(
            self.emissions_scope,
            self.zeta,
            self.baseline_e_tons,
            self.baseline_g_tons,
            self.emissions_budget_tons,
            self.budget_rule,
        )
    }

    /// Whether a storage type is available under this scenario.
    pub fn storage_enabled(&self, st: &StorageType) -> bool {
        if !st.is_long_duration {
            return true;
        }
        self.ldes_enabled
            && self
                .ldes_storage_type
                .as_ref()
                .map_or(true, |id| *id == st.id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Hex SHA-256 of the compact JSON form; names run directories.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn short_hash(&self) -> String {
        self.hash()[..16].to_string()
    }
}

pub fn emissions_budget(
    scope: EmissionsScope,
    zeta: f64,
    baseline_e: f64,
    baseline_g: f64,
    override_tons: Option<f64>,
    rule: BudgetRule,
) -> f64 {
    if let Some(b) = override_tons {
        return b;
    }
    let base = match scope {
        EmissionsScope::PowerOnly => baseline_e,
        EmissionsScope::Joint => baseline_e + baseline_g,
    };
    match rule {
        BudgetRule::Table => zeta * base,
        BudgetRule::Equation => (1.0 - zeta) * base,
    }
}

/// Scenarios over the Cartesian product of NG and LCDF prices.
pub fn sensitivity_grid(
    base: &Scenario,
    ng_prices: &[f64],
    lcdf_prices: &[f64],
) -> Result<Vec<Scenario>, ScenarioError> {
    if ng_prices.is_empty() || lcdf_prices.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    let mut out = Vec::with_capacity(ng_prices.len() * lcdf_prices.len());
    for &ng in ng_prices {
        for &lcdf in lcdf_prices {
            let mut s = base.clone();
            s.ng_price = ng;
            s.lcdf_price = lcdf;
            s.name = format!("{}_ng{}_lcdf{}", base.name, ng, lcdf);
            out.push(s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DemandSet {
    /// Power node -> 8760 hourly MWh.
    pub elec: BTreeMap<String, Vec<f64>>,
    /// NG node -> 365 daily MMBtu.
    pub gas: BTreeMap<String, Vec<f64>>,
    /// (power node, plant type) -> 8760 capacity factors.
    pub cf: BTreeMap<(String, String), Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandTotals {
    pub elec_mwh: f64,
    pub gas_mmbtu: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElecRow {
    node: String,
    hour: usize,
    mwh: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GasRow {
    node: String,
    day: usize,
    mmbtu: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CfRow {
    node: String,
    plant_type: String,
    hour: usize,
    factor: f64,
}

fn schema(file: &str, row: usize, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::SchemaViolation {
        file: file.into(),
        row: row as u64 + 2,
        msg: msg.into(),
    }
}

fn fill<K: Ord + Clone>(
    map: &mut BTreeMap<K, Vec<f64>>,
    key: K,
    idx1: usize,
    len: usize,
    v: f64,
    file: &str,
    row: usize,
) -> Result<(), ScenarioError> {
    if idx1 == 0 || idx1 > len {
        return Err(schema(file, row, format!("index {idx1} outside 1..={len}")));
    }
    if !(v >= 0.0 && v.is_finite()) {
        return Err(schema(file, row, format!("value {v} must be finite and non-negative")));
    }
    let s = map.entry(key).or_insert_with(|| vec![f64::NAN; len]);
    if !s[idx1 - 1].is_nan() {
        return Err(schema(file, row, format!("duplicate index {idx1}")));
    }
    s[idx1 - 1] = v;
    Ok(())
}

fn check_complete<K: fmt::Debug>(
    map: &BTreeMap<K, Vec<f64>>,
    file: &str,
) -> Result<(), ScenarioError> {
    for (k, s) in map {
        if let Some(i) = s.iter().position(|v| v.is_nan()) {
            return Err(ScenarioError::Invalid(format!(
                "{file}: {k:?} is missing index {}",
                i + 1
            )));
        }
    }
    Ok(())
}

impl DemandSet {
    pub fn load(dir: &Path) -> Result<Self, ScenarioError> {
        let mut d = DemandSet::default();
        let rows: Vec<ElecRow> = read_rows(&dir.join("elec_demand.csv"))?;
        for (i, r) in rows.into_iter().enumerate() {
            fill(&mut d.elec, r.node, r.hour, HOURS, r.mwh, "elec_demand.csv", i)?;
        }
        let rows: Vec<GasRow> = read_rows(&dir.join("gas_demand.csv"))?;
        for (i, r) in rows.into_iter().enumerate() {
            fill(&mut d.gas, r.node, r.day, DAYS, r.mmbtu, "gas_demand.csv", i)?;
        }
        let rows: Vec<CfRow> = read_rows(&dir.join("cf.csv"))?;
        for (i, r) in rows.into_iter().enumerate() {
            if r.factor > 1.0 {
                return Err(schema("cf.csv", i, format!("factor {} above 1", r.factor)));
            }
            fill(&mut d.cf, (r.node, r.plant_type), r.hour, HOURS, r.factor, "cf.csv", i)?;
        }
        check_complete(&d.elec, "elec_demand.csv")?;
        check_complete(&d.gas, "gas_demand.csv")?;
        check_complete(&d.cf, "cf.csv")?;
        Ok(d)
    }

    pub fn write(&self, dir: &Path) -> Result<(), ScenarioError> {
        std::fs::create_dir_all(dir).map_err(|e| ScenarioError::from((dir.to_path_buf(), e)))?;
        let rows: Vec<ElecRow> = self
            .elec
            .iter()
            .flat_map(|(n, s)| {
                s.iter().enumerate().map(move |(h, &v)| ElecRow {
                    node: n.clone(),
                    hour: h + 1,
                    mwh: v,
                })
            })
            .collect();
        write_rows(&dir.join("elec_demand.csv"), &rows)?;
        let rows: Vec<GasRow> = self
            .gas
            .iter()
            .flat_map(|(k, s)| {
                s.iter().enumerate().map(move |(d, &v)| GasRow {
                    node: k.clone(),
                    day: d + 1,
                    mmbtu: v,
                })
            })
            .collect();
        write_rows(&dir.join("gas_demand.csv"), &rows)?;
        let rows: Vec<CfRow> = self
            .cf
            .iter()
            .flat_map(|((n, p), s)| {
                s.iter().enumerate().map(move |(h, &v)| CfRow {
                    node: n.clone(),
                    plant_type: p.clone(),
                    hour: h + 1,
                    factor: v,
                })
            })
            .collect();
        crate::csvio::write_rows_or_header(
            &dir.join("cf.csv"),
            &rows,
            &["node", "plant_type", "hour", "factor"],
        )?;
        Ok(())
    }

    pub fn totals(&self) -> DemandTotals {
        DemandTotals {
            elec_mwh: self.elec.values().flatten().sum(),
            gas_mmbtu: self.gas.values().flatten().sum(),
        }
    }

    /// Capacity factor, or 0 when no profile is given.
    pub fn cf_at(&self, node: &str, plant: &str, hour: usize) -> f64 {
        self.cf
            .get(&(node.to_string(), plant.to_string()))
            .map_or(0.0, |s| s[hour])
    }
}

/// Result of [`build_he_from_bau`] with before/after totals.
#[derive(Debug, Clone)]
pub struct HeTransform {
    pub demand: DemandSet,
    pub bau: DemandTotals,
    pub he: DemandTotals,
}

/// Moves heating load from gas to power: `elec + delta`, `gas * (1 - share)`.
pub fn build_he_from_bau(
    bau: &DemandSet,
    elec_heating_delta: &BTreeMap<String, Vec<f64>>,
    gas_heating_share: &BTreeMap<String, Vec<f64>>,
) -> Result<HeTransform, ScenarioError> {
    let mut he = bau.clone();
    for (n, delta) in elec_heating_delta {
        let s = he
            .elec
            .get_mut(n)
            .ok_or_else(|| ScenarioError::Invalid(format!("no BAU load for power node {n}")))?;
        if delta.len() != s.len() {
            return Err(ScenarioError::Invalid(format!("delta for {n} has wrong length")));
        }
        for (i, (v, d)) in s.iter_mut().zip(delta).enumerate() {
            if !(*d >= 0.0) {
                return Err(ScenarioError::NegativeResult {
                    node: n.clone(),
                    index: i,
                });
            }
            *v += d;
        }
    }
    for (k, share) in gas_heating_share {
        let s = he
            .gas
            .get_mut(k)
            .ok_or_else(|| ScenarioError::Invalid(format!("no BAU load for NG node {k}")))?;
        if share.len() != s.len() {
            return Err(ScenarioError::Invalid(format!("share for {k} has wrong length")));
        }
        for (i, (v, f)) in s.iter_mut().zip(share).enumerate() {
            if !(0.0..=1.0).contains(f) {
                return Err(ScenarioError::NegativeResult {
                    node: k.clone(),
                    index: i,
                });
            }
            *v *= 1.0 - f;
        }
    }
    Ok(HeTransform {
        bau: bau.totals(),
        he: he.totals(),
        demand: he,
    })
}
