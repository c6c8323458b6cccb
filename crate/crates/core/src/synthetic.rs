//! Seeded synthetic systems: a six-state New England-like network at full
//! scale and small fixtures for oracle tests.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scenario::{DemandSet, Scenario};
use crate::timegrid::{TimeGrid, DAYS, HOURS};
use crate::topology::{
    CcsParams, EnergySystem, Fuel, NgNode, Pipeline, PlantSite, PlantType, PowerNode, StorageType,
    SvlNode, TransmissionLine,
};

/// A complete model input set.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub system: EnergySystem,
    pub demand: DemandSet,
    pub grid: TimeGrid,
    pub scenario: Scenario,
}

impl Fixture {
    pub fn input(&self) -> crate::build::ModelInput<'_> {
        crate::build::ModelInput {
            system: &self.system,
            grid: &self.grid,
            demand: &self.demand,
            scenario: &self.scenario,
        }
    }
}

pub fn ccs_params() -> CcsParams {
    CcsParams {
        annual_storage_cap_tons: 12.78e6,
        pipe_capex_per_mile_ton: 0.0196,
        storage_cost_per_ton: 0.13,
        pipe_elec_mwh_per_mile_ton_h: 0.00365e-6,
        pump_elec_mwh_per_ton_h: 0.478e-6,
        compressor_spacing_miles: 3.3,
    }
}

#[allow(clippy::too_many_arguments)]
fn plant(
    id: &str,
    existing: bool,
    fuel: Fuel,
    kind: Kind,
    nameplate: f64,
    min_stable: f64,
    ramp: f64,
    heat_rate: f64,
    capex: f64,
    fom: f64,
    vom: f64,
    startup: f64,
    decom: f64,
) -> PlantType {
    PlantType {
        id: id.into(),
        is_existing: existing,
        fuel,
        is_vre: kind == Kind::Vre,
        is_thermal_uc: kind == Kind::Thermal,
        has_ccs: false,
        retirable: true,
        nameplate_mw: nameplate,
        min_stable_frac: min_stable,
        ramp_frac: ramp,
        heat_rate_mmbtu_per_mwh: heat_rate,
        capture_rate: 0.0,
        capex_per_plant: capex,
        fom_per_plant: fom,
        vom_per_mwh: vom,
        startup_cost: startup,
        decom_cost_per_plant: decom,
        fuel_price: if fuel == Fuel::Uranium { 0.72 } else { 0.0 },
        lifetime_years: 30.0,
        resource_class: None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Thermal,
    Vre,
    Firm,
}

/// The twelve plant types: five existing, seven candidates.
pub fn plant_catalog() -> Vec<PlantType> {
    use Fuel::{GasFired as G, None as N, Uranium as U};
    use Kind::{Firm, Thermal, Vre};
    let mut v = vec![
        plant("ng", true, G, Thermal, 173.0, 0.31, 0.96, 8.7, 0.0, 3.6e6, 5.0, 4.52e4, 5.0e6),
        plant("solar", true, N, Vre, 6.3, 0.0, 1.0, 0.0, 0.0, 1.45e5, 0.0, 0.0, 4.5e4),
        plant("wind", true, N, Vre, 42.0, 0.0, 1.0, 0.0, 0.0, 1.8e6, 0.0, 0.0, 1e6),
        plant("hydro", true, N, Firm, 23.0, 0.0, 1.0, 0.0, 0.0, 1.8e6, 0.0, 0.0, 0.0),
        plant("nuclear", true, U, Thermal, 933.0, 0.42, 0.25, 10.6, 0.0, 1.4e8, 2.0, 4.6e4, 3.0e8),
        plant("OCGT", false, G, Thermal, 237.0, 0.25, 1.0, 9.72, 1.85e8, 5.0e6, 5.0, 8.0e3, 0.0),
        plant("CCGT", false, G, Thermal, 573.0, 0.33, 1.0, 6.36, 5.36e8, 1.55e7, 2.0, 4.52e4, 0.0),
        plant("CCGT-CCS", false, G, Thermal, 400.0, 0.5, 1.0, 7.16, 8.67e8, 2.6e7, 6.0, 3.79e4, 0.0),
        plant("solar-UPV", false, N, Vre, 10.0, 0.0, 1.0, 0.0, 6.72e6, 1.5e5, 0.0, 0.0, 0.0),
        plant("wind-new", false, N, Vre, 10.0, 0.0, 1.0, 0.0, 8.01e6, 3.5e5, 0.0, 0.0, 0.0),
        plant("wind-offshore", false, N, Vre, 10.0, 0.0, 1.0, 0.0, 2.04e7, 5.22e7, 0.0, 0.0, 0.0),
        plant("nuclear-new", false, U, Thermal, 360.0, 0.5, 0.25, 10.46, 2.21e9, 5.22e7, 2.0, 4.6e4, 0.0),
    ];
    for p in &mut v {
        match p.id.as_str() {
            "hydro" => p.retirable = false,
            "CCGT-CCS" => {
                p.has_ccs = true;
                p.capture_rate = 0.9;
            }
            _ => {}
        }
        p.resource_class = match p.id.as_str() {
            "solar" | "solar-UPV" => Some("solar".into()),
            "wind" | "wind-new" => Some("wind".into()),
            "wind-offshore" => Some("wind-offshore".into()),
            "nuclear" | "nuclear-new" => Some("nuclear".into()),
            _ => None,
        };
    }
    v
}

pub fn storage_catalog() -> Vec<StorageType> {
    let st = |id: &str, ldes, e_capex: f64, p_capex: f64, ch, dis, e_fom: f64, p_fom: f64, lt| {
        StorageType {
            id: id.into(),
            is_long_duration: ldes,
            energy_capex_per_mwh: e_capex * 1e3,
            power_capex_per_mw: p_capex * 1e3,
            energy_fom_per_mwh_yr: e_fom * 1e3,
            power_fom_per_mw_yr: p_fom * 1e3,
            charge_eff: ch,
            discharge_eff: dis,
            hourly_self_discharge: 2.08e-5,
            lifetime_years: lt,
        }
    };
    vec![
        st("li-ion", false, 129.0, 156.0, 0.92, 0.92, 3.22, 3.9, 15.0),
        st("metal-air-low", true, 0.1, 595.0, 0.7, 0.59, 0.0, 14.9, 25.0),
        st("metal-air-high", true, 3.6, 950.0, 0.72, 0.6, 100.0, 23.7, 25.0),
    ]
}

pub fn svl_node(id: &str, storage: f64, vapor: f64, liq: f64) -> SvlNode {
    SvlNode {
        id: id.into(),
        storage_cap_mmbtu: storage,
        vapor_cap_mmbtu_per_day: vapor,
        liq_cap_mmbtu_per_day: liq,
        storage_capex_per_mmbtu: 729.1,
        vapor_capex_per_mmbtu_per_day: 1818.31,
        storage_fom_per_mmbtu: 3.6,
        vapor_fom_per_mmbtu_per_day: 327.3,
        liq_charge_eff: 1.0,
        vapor_discharge_eff: 0.989,
        boiloff_daily: 0.0005,
        lifetime_years: 30.0,
        initial_storage_mmbtu: 0.5 * storage,
    }
}

/// Great-circle distance in miles.
fn miles(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (la1, lo1) = (a.0.to_radians(), a.1.to_radians());
    let (la2, lo2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((la2 - la1) / 2.0).sin().powi(2)
        + la1.cos() * la2.cos() * ((lo2 - lo1) / 2.0).sin().powi(2);
    2.0 * 3958.8 * h.sqrt().asin()
}

fn nearest(from: (f64, f64), pts: &[(f64, f64)], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        miles(from, pts[a])
            .total_cmp(&miles(from, pts[b]))
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

const STATES: [(&str, (f64, f64)); 6] = [
    ("CT", (41.6, -72.7)),
    ("MA", (42.3, -71.8)),
    ("ME", (45.0, -69.2)),
    ("NH", (43.7, -71.6)),
    ("RI", (41.7, -71.5)),
    ("VT", (44.0, -72.7)),
];

/// Existing MW by state: ng, solar, wind, hydro, nuclear.
const EXISTING_MW: [[f64; 5]; 6] = [
    [4375.0, 12.0, 5.0, 0.0, 1888.0],
    [1763.0, 3.0, 40.0, 0.0, 0.0],
    [0.0, 0.0, 629.0, 529.0, 0.0],
    [1808.0, 0.0, 78.0, 349.0, 1226.0],
    [6667.0, 369.0, 65.0, 1432.0, 617.0],
    [0.0, 61.0, 111.0, 199.0, 0.0],
];

/// Regional capex multipliers for OCGT, CCGT, CCGT-CCS, solar-UPV, wind-new,
/// wind-offshore, nuclear-new.
const MULTIPLIERS: [[f64; 7]; 6] = [
    [1.25, 1.3, 1.3, 1.15, 1.4, 1.1, 1.1],
    [1.1, 1.1, 1.1, 1.05, 1.35, 1.1, 1.05],
    [1.25, 1.3, 1.3, 1.1, 1.35, 1.1, 1.1],
    [1.1, 1.1, 1.1, 1.05, 1.35, 1.1, 1.05],
    [1.2, 1.25, 1.25, 1.1, 1.35, 1.1, 1.05],
    [1.1, 1.1, 1.1, 1.05, 1.35, 1.1, 1.05],
];

const NEW_TYPES: [&str; 7] = [
    "OCGT",
    "CCGT",
    "CCGT-CCS",
    "solar-UPV",
    "wind-new",
    "wind-offshore",
    "nuclear-new",
];
const EXISTING_TYPES: [&str; 5] = ["ng", "solar", "wind", "hydro", "nuclear"];

/// Neighbouring state pairs with their existing line counts.
const CORRIDORS: [(usize, usize, usize); 7] = [
    (0, 1, 4),
    (0, 4, 3),
    (1, 4, 4),
    (1, 3, 4),
    (1, 5, 2),
    (3, 5, 3),
    (2, 3, 3),
];

const CO2_SITE: (f64, f64) = (41.0, -77.7);

/// Annual electric load (MWh) and non-power gas load (MMBtu) of the synthetic region.
pub const NE_ELEC_MWH: f64 = 127.0e6;
pub const NE_GAS_MMBTU: f64 = 445.0e6;

/// Six power nodes, 23+7 lines, 18 NG nodes with 28+36 pipelines, 7 SVL nodes.
pub fn new_england_system() -> EnergySystem {
    let plant_types = plant_catalog();
    let storage_types = storage_catalog();
    let ng_pts: Vec<(f64, f64)> = (0..18)
        .map(|i| {
            let c = STATES[i / 3].1;
            let a = 2.0 * PI * (i % 3) as f64 / 3.0 + 0.4 * (i / 3) as f64;
            (c.0 + 0.35 * a.sin(), c.1 + 0.45 * a.cos())
        })
        .collect();
    let svl_pts: Vec<(f64, f64)> = vec![
        (42.4, -71.1),
        (41.3, -72.9),
        (43.1, -70.8),
        (42.1, -72.6),
        (44.8, -68.8),
        (42.4, -70.9),
        (41.5, -71.3),
    ];
    let ng_ids: Vec<String> = (1..=18).map(|i| format!("g{i:02}")).collect();
    let svl_ids: Vec<String> = (1..=7).map(|i| format!("s{i}")).collect();

    let mut power_nodes = Vec::new();
    let mut plant_sites = Vec::new();
    let mut power_of_ng: Vec<Vec<String>> = vec![Vec::new(); 18];
    for (s, (id, at)) in STATES.iter().enumerate() {
        let gas: Vec<usize> = nearest(*at, &ng_pts, 3);
        for &k in &gas {
            power_of_ng[k].push(id.to_string());
        }
        let capex_multipliers = NEW_TYPES
            .iter()
            .zip(MULTIPLIERS[s])
            .map(|(t, m)| (t.to_string(), m))
            .collect();
        power_nodes.push(PowerNode {
            id: id.to_string(),
            state: id.to_string(),
            co2_distance_miles: miles(*at, CO2_SITE),
            storage_types: storage_types.iter().map(|t| t.id.clone()).collect(),
            adjacent_gas_nodes: gas.iter().map(|&k| ng_ids[k].clone()).collect(),
            capex_multipliers,
        });
        for (j, t) in EXISTING_TYPES.iter().enumerate() {
            let mw = EXISTING_MW[s][j];
            if mw > 0.0 {
                let u = plant_types.iter().find(|p| p.id == *t).unwrap().nameplate_mw;
                plant_sites.push(PlantSite {
                    node: id.to_string(),
                    plant_type: t.to_string(),
                    existing_count: (mw / u).round().max(1.0) as u32,
                    max_new: None,
                });
            }
        }
        for t in NEW_TYPES {
            plant_sites.push(PlantSite {
                node: id.to_string(),
                plant_type: t.to_string(),
                existing_count: 0,
                max_new: None,
            });
        }
    }

    let mut lines = Vec::new();
    let mut n_exist = 0;
    for (c, &(a, b, count)) in CORRIDORS.iter().enumerate() {
        let len = miles(STATES[a].1, STATES[b].1);
        for _ in 0..count {
            n_exist += 1;
            lines.push(TransmissionLine {
                id: format!("e{n_exist:02}"),
                node_a: STATES[a].0.into(),
                node_b: STATES[b].0.into(),
                is_existing: true,
                capacity_mw: 1200.0,
                susceptance: 1.5e5 / len,
                length_miles: len,
                capex: 0.0,
                lifetime_years: 30.0,
            });
        }
        lines.push(TransmissionLine {
            id: format!("c{:02}", c + 1),
            node_a: STATES[a].0.into(),
            node_b: STATES[b].0.into(),
            is_existing: false,
            capacity_mw: 2000.0,
            susceptance: 2.5e5 / len,
            length_miles: len,
            capex: 3500.0 * 2000.0 * len,
            lifetime_years: 30.0,
        });
    }

    // injection capacity skewed toward southern entry points
    let inj: Vec<f64> = (0..18)
        .map(|k| 1.0e5 + 4.0e5 * ((k * 7) % 11) as f64 / 10.0 * if k / 3 == 2 { 0.5 } else { 1.0 })
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for a in 0..18 {
        for b in a + 1..18 {
            pairs.push((miles(ng_pts[a], ng_pts[b]), a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    // Kruskal tree, then the shortest remaining pairs up to 28 edges
    let mut comp: Vec<usize> = (0..18).collect();
    fn root(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    let mut chosen = Vec::new();
    let mut rest = Vec::new();
    for &(len, a, b) in &pairs {
        let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
        if ra != rb {
            comp[ra] = rb;
            chosen.push((len, a, b));
        } else {
            rest.push((len, a, b));
        }
    }
    chosen.extend(rest.into_iter().take(28 - chosen.len()));
    let mut pipelines = Vec::new();
    for (i, &(len, a, b)) in chosen.iter().enumerate() {
        // flow runs away from the better-supplied end
        let (f, t) = if inj[a] >= inj[b] { (a, b) } else { (b, a) };
        pipelines.push(Pipeline {
            id: format!("pe{:02}", i + 1),
            from_node: ng_ids[f].clone(),
            to_node: ng_ids[t].clone(),
            is_existing: true,
            capacity_mmbtu_per_day: inj[f],
            length_miles: len,
            capex: 0.0,
            lifetime_years: 30.0,
        });
    }
    let mean_cap = pipelines.iter().map(|p| p.capacity_mmbtu_per_day).sum::<f64>()
        / pipelines.len() as f64;
    let mut c = 0;
    for a in 0..18 {
        let near: Vec<usize> = nearest(ng_pts[a], &ng_pts, 3).into_iter().filter(|&b| b != a).take(2).collect();
        for b in near {
            c += 1;
            let len = miles(ng_pts[a], ng_pts[b]);
            pipelines.push(Pipeline {
                id: format!("pc{c:02}"),
                from_node: ng_ids[a].clone(),
                to_node: ng_ids[b].clone(),
                is_existing: false,
                capacity_mmbtu_per_day: mean_cap,
                length_miles: len,
                capex: 5.34e6 * len,
                lifetime_years: 30.0,
            });
        }
    }

    let ng_nodes = (0..18)
        .map(|k| NgNode {
            id: ng_ids[k].clone(),
            injection_cap_mmbtu_per_day: inj[k],
            adjacent_svl_nodes: nearest(ng_pts[k], &svl_pts, 2)
                .into_iter()
                .map(|j| svl_ids[j].clone())
                .collect(),
            adjacent_power_nodes: power_of_ng[k].clone(),
        })
        .collect();

    // uneven split of regional LNG capacity; s6, s7 are import terminals
    let share = [0.24, 0.18, 0.14, 0.1, 0.08, 0.14, 0.12];
    let svl_nodes = (0..7)
        .map(|j| {
            let liq = if j < 5 { 1.5e4 * share[j] / 0.74 } else { 0.0 };
            svl_node(&svl_ids[j], 16.0e6 * share[j], 1.5e6 * share[j], liq)
        })
        .collect();

    let resource_limits = BTreeMap::from([
        ("solar".to_string(), 22_000.0),
        ("wind".to_string(), 10_000.0),
        ("wind-offshore".to_string(), 280_000.0),
        ("nuclear".to_string(), 3_500.0),
    ]);
    EnergySystem {
        power_nodes,
        lines,
        plant_types,
        plant_sites,
        storage_types,
        ng_nodes,
        pipelines,
        svl_nodes,
        ccs: ccs_params(),
        resource_limits,
    }
    .canonicalize()
}

fn seasonal(day: usize) -> f64 {
    // +1 in mid-January, -1 in mid-July
    (2.0 * PI * (day as f64 - 15.0) / DAYS as f64).cos()
}

fn elec_profile(rng: &mut ChaCha8Rng, annual_mwh: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..HOURS)
        .map(|t| {
            let (day, hr) = (t / 24, t % 24);
            let s = seasonal(day);
            let diurnal = (2.0 * PI * (hr as f64 - 17.0) / 24.0).cos();
            (1.0 + 0.12 * s * s + 0.05 * s + 0.18 * diurnal) * (1.0 + 0.03 * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x *= annual_mwh / total);
    v
}

fn gas_profile(rng: &mut ChaCha8Rng, annual: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..DAYS)
        .map(|d| (1.0 + 0.75 * seasonal(d)).max(0.15) * (1.0 + 0.08 * rng.gen_range(-1.0..1.0)))
        .collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x *= annual / total);
    v
}

fn solar_cf(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut cloud = 1.0;
    (0..HOURS)
        .map(|t| {
            let (day, hr) = (t / 24, t % 24);
            if hr == 0 {
                cloud = rng.gen_range(0.35..1.0);
            }
            let len = 12.0 - 3.0 * seasonal(day);
            let x = (hr as f64 + 0.5 - (12.0 - len / 2.0)) / len;
            if (0.0..1.0).contains(&x) {
                ((PI * x).sin() * (0.85 - 0.2 * seasonal(day)) * cloud).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

fn wind_cf(rng: &mut ChaCha8Rng, mean: f64) -> Vec<f64> {
    let mut z: f64 = 0.0;
    (0..HOURS)
        .map(|t| {
            z = 0.95 * z + 0.3 * rng.gen_range(-1.0..1.0);
            (mean + 0.1 * seasonal(t / 24) + 0.25 * z).clamp(0.0, 1.0)
        })
        .collect()
}

/// Hourly loads and capacity factors for every node of `system`; electric
/// load split in proportion to `elec_share`, gas evenly with seeded scatter.
pub fn synthetic_demand(
    system: &EnergySystem,
    elec_mwh: f64,
    gas_mmbtu: f64,
    seed: u64,
) -> DemandSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = system
        .power_nodes
        .iter()
        .map(|n| match n.state.as_str() {
            "CT" => 0.25,
            "MA" => 0.45,
            "ME" => 0.09,
            "NH" => 0.09,
            "RI" => 0.07,
            "VT" => 0.05,
            _ => 1.0,
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let mut elec = BTreeMap::new();
    let mut cf = BTreeMap::new();
    for (n, w) in system.power_nodes.iter().zip(&weights) {
        elec.insert(n.id.clone(), elec_profile(&mut rng, elec_mwh * w / wsum));
        for p in system.plant_types.iter().filter(|p| p.is_vre) {
            let series = if p.id.contains("solar") {
                solar_cf(&mut rng)
            } else if p.id.contains("offshore") {
                wind_cf(&mut rng, 0.45)
            } else {
                wind_cf(&mut rng, 0.3)
            };
            cf.insert((n.id.clone(), p.id.clone()), series);
        }
    }
    let scatter: Vec<f64> = system.ng_nodes.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
    let ssum: f64 = scatter.iter().sum();
    let gas = system
        .ng_nodes
        .iter()
        .zip(&scatter)
        .map(|(k, s)| (k.id.clone(), gas_profile(&mut rng, gas_mmbtu * s / ssum)))
        .collect();
    DemandSet { elec, gas, cf }
}

/// The full-scale synthetic region with `k` representative days.
pub fn new_england(seed: u64, k: usize) -> Result<Fixture, crate::error::TimeGridError> {
    let system = new_england_system();
    let demand = synthetic_demand(&system, NE_ELEC_MWH, NE_GAS_MMBTU, seed);
    let grid = crate::timegrid::select_rep_days(&demand.elec, &demand.gas, k, seed)?;
    let scenario = Scenario {
        name: "new-england".into(),
        rep_days: k,
        seed,
        ..Scenario::default()
    };
    Ok(Fixture {
        name: "new-england".into(),
        system,
        demand,
        grid,
        scenario,
    })
}

const MMBTU_PER_MWH: f64 = 3.412;
const FURNACE_EFF: f64 = 0.85;
const HEAT_PUMP_COP: f64 = 2.5;

/// Heating inputs for [`crate::scenario::build_he_from_bau`]: `share` of every
/// NG node's daily load moves to heat pumps at the node's first adjacent
/// power node, spread evenly over the day's hours. Nodes without a power
/// neighbour keep their gas load.
pub fn heating_electrification(
    system: &EnergySystem,
    bau: &DemandSet,
    share: f64,
) -> (BTreeMap<String, Vec<f64>>, BTreeMap<String, Vec<f64>>) {
    let mut delta: BTreeMap<String, Vec<f64>> = system
        .power_nodes
        .iter()
        .map(|n| (n.id.clone(), vec![0.0; HOURS]))
        .collect();
    let mut shares = BTreeMap::new();
    for k in &system.ng_nodes {
        let (Some(gas), Some(p)) = (bau.gas.get(&k.id), k.adjacent_power_nodes.first()) else {
            continue;
        };
        let Some(series) = delta.get_mut(p) else { continue };
        for (day, g) in gas.iter().enumerate() {
            let mwh = g * share * FURNACE_EFF / (MMBTU_PER_MWH * HEAT_PUMP_COP);
            for v in &mut series[day * 24..day * 24 + 24] {
                *v += mwh / 24.0;
            }
        }
        shares.insert(k.id.clone(), vec![share; DAYS]);
    }
    (delta, shares)
}

/// Two rep days: calendar day 1 stands for the first half of the year, day 183 for the rest.
pub fn two_day_grid() -> TimeGrid {
    let day_of = (0..DAYS).map(|d| usize::from(d >= 182)).collect();
    TimeGrid::from_parts(vec![0, 182], day_of).expect("valid split")
}

pub fn one_day_grid() -> TimeGrid {
    TimeGrid::from_parts(vec![0], vec![0; DAYS]).expect("valid")
}

fn flat(v: f64, n: usize) -> Vec<f64> {
    vec![v; n]
}

pub fn bare_node(id: &str, gas: &[&str], storage: &[&str]) -> PowerNode {
    PowerNode {
        id: id.into(),
        state: id.into(),
        co2_distance_miles: 250.0,
        storage_types: storage.iter().map(|s| s.to_string()).collect(),
        adjacent_gas_nodes: gas.iter().map(|s| s.to_string()).collect(),
        capex_multipliers: BTreeMap::new(),
    }
}

pub fn bare_ng(id: &str, cap: f64, power: &[&str], svl: &[&str]) -> NgNode {
    NgNode {
        id: id.into(),
        injection_cap_mmbtu_per_day: cap,
        adjacent_svl_nodes: svl.iter().map(|s| s.to_string()).collect(),
        adjacent_power_nodes: power.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn site(node: &str, plant: &str, existing: u32, max_new: u32) -> PlantSite {
    PlantSite {
        node: node.into(),
        plant_type: plant.into(),
        existing_count: existing,
        max_new: Some(max_new),
    }
}

pub fn line(id: &str, a: &str, b: &str, existing: bool, cap: f64, capex: f64) -> TransmissionLine {
    TransmissionLine {
        id: id.into(),
        node_a: a.into(),
        node_b: b.into(),
        is_existing: existing,
        capacity_mw: cap,
        susceptance: 500.0,
        length_miles: 50.0,
        capex,
        lifetime_years: 30.0,
    }
}

pub fn pipe(id: &str, from: &str, to: &str, existing: bool, cap: f64, capex: f64) -> Pipeline {
    Pipeline {
        id: id.into(),
        from_node: from.into(),
        to_node: to.into(),
        is_existing: existing,
        capacity_mmbtu_per_day: cap,
        length_miles: 20.0,
        capex,
        lifetime_years: 30.0,
    }
}

/// Catalog plant, storage and CCS data with no nodes or links.
pub fn empty_system() -> EnergySystem {
    EnergySystem {
        power_nodes: Vec::new(),
        lines: Vec::new(),
        plant_types: plant_catalog(),
        plant_sites: Vec::new(),
        storage_types: storage_catalog(),
        ng_nodes: Vec::new(),
        pipelines: Vec::new(),
        svl_nodes: Vec::new(),
        ccs: ccs_params(),
        resource_limits: BTreeMap::new(),
    }
}

pub fn micro_scenario(name: &str) -> Scenario {
    Scenario {
        name: name.into(),
        rps_level: 0.0,
        emissions_budget_tons: Some(1e12),
        rep_days: 2,
        ..Scenario::default()
    }
}

pub fn finish(name: &str, system: EnergySystem, demand: DemandSet, grid: TimeGrid, scenario: Scenario) -> Fixture {
    Fixture {
        name: name.into(),
        system: system.canonicalize().validated().expect("fixture system is valid"),
        demand,
        grid,
        scenario,
    }
}

pub fn demand_for(system: &EnergySystem, elec: &[(&str, f64)], gas: &[(&str, f64)]) -> DemandSet {
    DemandSet {
        elec: system
            .power_nodes
            .iter()
            .map(|n| {
                let v = elec.iter().find(|e| e.0 == n.id).map_or(0.0, |e| e.1);
                (n.id.clone(), flat(v, HOURS))
            })
            .collect(),
        gas: system
            .ng_nodes
            .iter()
            .map(|k| {
                let v = gas.iter().find(|e| e.0 == k.id).map_or(0.0, |e| e.1);
                (k.id.clone(), flat(v, DAYS))
            })
            .collect(),
        cf: BTreeMap::new(),
    }
}

/// One node, one NG node, nothing to serve.
pub fn micro_zero_demand() -> Fixture {
    let mut s = empty_system();
    s.power_nodes.push(bare_node("a", &["k1"], &["li-ion"]));
    s.ng_nodes.push(bare_ng("k1", 1e5, &["a"], &[]));
    s.plant_sites.push(site("a", "CCGT", 0, 2));
    s.plant_sites.push(site("a", "nuclear", 0, 0));
    let d = demand_for(&s, &[], &[]);
    finish("zero-demand", s, d, two_day_grid(), micro_scenario("zero-demand"))
}

/// Nominal per-plant nuclear capacity used by [`micro_nuclear_only`].
pub const MICRO_NUCLEAR_MW: f64 = 100.0;

/// A single mandatory, non-retirable 100 MW nuclear unit serving a flat 100 MW.
pub fn micro_nuclear_only() -> Fixture {
    let mut s = empty_system();
    for p in &mut s.plant_types {
        if p.id == "nuclear" {
            p.nameplate_mw = MICRO_NUCLEAR_MW;
            p.retirable = false;
        }
    }
    s.power_nodes.push(bare_node("a", &[], &[]));
    s.ng_nodes.push(bare_ng("k1", 0.0, &[], &[]));
    s.plant_sites.push(site("a", "nuclear", 1, 0));
    let d = demand_for(&s, &[("a", MICRO_NUCLEAR_MW)], &[]);
    finish("nuclear-only", s, d, two_day_grid(), micro_scenario("nuclear-only"))
}

/// Cheap hydro at `a`, load at `b`, a weak existing line and one candidate.
pub fn micro_candidate_line() -> Fixture {
    let mut s = empty_system();
    for p in &mut s.plant_types {
        if p.id == "hydro" {
            p.nameplate_mw = 400.0;
        }
    }
    s.power_nodes.push(bare_node("a", &[], &[]));
    s.power_nodes.push(bare_node("b", &["k1"], &[]));
    s.ng_nodes.push(bare_ng("k1", 1e6, &["b"], &[]));
    s.plant_sites.push(site("a", "hydro", 1, 0));
    s.plant_sites.push(site("b", "OCGT", 0, 2));
    s.lines.push(line("l1", "a", "b", true, 100.0, 0.0));
    s.lines.push(line("l2", "a", "b", false, 300.0, 2.0e8));
    let d = demand_for(&s, &[("b", 350.0)], &[]);
    finish("candidate-line", s, d, two_day_grid(), micro_scenario("candidate-line"))
}

/// CCGT fuelled over a two-node gas network with a candidate pipeline and an
/// LCDF option under a joint cap.
pub fn micro_gas_network() -> Fixture {
    let mut s = empty_system();
    s.power_nodes.push(bare_node("a", &["k2"], &[]));
    s.ng_nodes.push(bare_ng("k1", 1.2e5, &[], &[]));
    s.ng_nodes.push(bare_ng("k2", 2.0e3, &["a"], &[]));
    s.plant_sites.push(site("a", "CCGT", 0, 1));
    s.plant_sites.push(site("a", "OCGT", 0, 1));
    s.pipelines.push(pipe("p1", "k1", "k2", true, 1.0e4, 0.0));
    s.pipelines.push(pipe("p2", "k1", "k2", false, 6.0e4, 5.34e6 * 20.0));
    let d = demand_for(&s, &[("a", 400.0)], &[("k1", 5.0e3), ("k2", 6.0e3)]);
    let mut sc = micro_scenario("gas-network");
    sc.emissions_budget_tons = Some(1.5e6);
    finish("gas-network", s, d, two_day_grid(), sc)
}

/// CCGT-CCS as the only buildable unit at a node with a long CO2 line.
pub fn micro_ccs() -> Fixture {
    let mut s = empty_system();
    s.power_nodes.push(bare_node("a", &["k1"], &[]));
    s.ng_nodes.push(bare_ng("k1", 1.0e5, &["a"], &[]));
    s.plant_sites.push(site("a", "CCGT-CCS", 0, 1));
    s.plant_sites.push(site("a", "OCGT", 0, 1));
    let d = demand_for(&s, &[("a", 300.0)], &[("k1", 1.0e3)]);
    let mut sc = micro_scenario("ccs");
    sc.emissions_budget_tons = Some(2.5e5);
    finish("ccs", s, d, two_day_grid(), sc)
}

/// Solar plus Li-ion and long-duration storage with a seasonal load.
pub fn micro_storage() -> Fixture {
    let mut s = empty_system();
    for p in &mut s.plant_types {
        if p.id == "solar-UPV" {
            p.nameplate_mw = 150.0;
            p.capex_per_plant = 6.72e6 * 15.0;
            p.fom_per_plant = 1.5e5 * 15.0;
        }
    }
    s.power_nodes.push(bare_node("a", &["k1"], &["li-ion", "metal-air-low"]));
    s.ng_nodes.push(bare_ng("k1", 1.0e5, &["a"], &[]));
    s.plant_sites.push(site("a", "solar-UPV", 0, 3));
    s.plant_sites.push(site("a", "OCGT", 0, 1));
    let mut d = demand_for(&s, &[], &[]);
    d.elec.insert(
        "a".into(),
        (0..HOURS).map(|t| if t / 24 < 182 { 60.0 } else { 40.0 }).collect(),
    );
    d.cf.insert(
        ("a".into(), "solar-UPV".into()),
        (0..HOURS)
            .map(|t| {
                let hr = t % 24;
                let peak = if t / 24 < 182 { 0.6 } else { 0.9 };
                if (8..16).contains(&hr) { peak } else { 0.0 }
            })
            .collect(),
    );
    let mut sc = micro_scenario("storage");
    sc.ldes_enabled = true;
    sc.ldes_storage_type = Some("metal-air-low".into());
    sc.emissions_budget_tons = Some(5.0e4);
    sc.elec_shed_cost = 2000.0;
    finish("storage", s, d, two_day_grid(), sc)
}

/// Two NG nodes and one SVL facility; winter load exceeds injection.
pub fn micro_svl() -> Fixture {
    let mut s = empty_system();
    s.power_nodes.push(bare_node("a", &["k1"], &[]));
    s.ng_nodes.push(bare_ng("k1", 4.0e4, &["a"], &["j1"]));
    s.ng_nodes.push(bare_ng("k2", 0.0, &[], &["j1"]));
    s.svl_nodes.push(svl_node("j1", 2.0e5, 3.0e3, 5.0e3));
    s.plant_sites.push(site("a", "OCGT", 0, 1));
    s.pipelines.push(pipe("p1", "k1", "k2", true, 6.0e3, 0.0));
    s.pipelines.push(pipe("p2", "k1", "k2", false, 4.0e3, 5.34e6 * 20.0));
    let mut d = demand_for(&s, &[("a", 100.0)], &[]);
    d.gas.insert("k1".into(), (0..DAYS).map(|day| 3.0e3 + 2.0e3 * seasonal(day).max(0.0)).collect());
    d.gas.insert("k2".into(), (0..DAYS).map(|day| 4.0e3 + 3.0e3 * seasonal(day)).collect());
    let mut sc = micro_scenario("svl");
    sc.lcdf_enabled = false;
    finish("svl", s, d, two_day_grid(), sc)
}

/// Every micro fixture used by the oracle-equivalence checks.
pub fn micro_fixtures() -> Vec<Fixture> {
    vec![
        micro_zero_demand(),
        micro_nuclear_only(),
        micro_candidate_line(),
        micro_gas_network(),
        micro_ccs(),
        micro_storage(),
        micro_svl(),
    ]
}

/// Two power nodes, three NG nodes and one SVL node; large enough to exercise
/// every coupling but solvable in seconds.
pub fn medium() -> Fixture {
    let mut s = empty_system();
    for p in &mut s.plant_types {
        if p.is_vre && !p.is_existing {
            p.nameplate_mw = 100.0;
            p.capex_per_plant *= 10.0;
            p.fom_per_plant *= 10.0;
        }
    }
    s.power_nodes.push(bare_node("a", &["k1", "k2"], &["li-ion", "metal-air-low"]));
    s.power_nodes.push(bare_node("b", &["k3"], &["li-ion", "metal-air-low"]));
    s.ng_nodes.push(bare_ng("k1", 6.0e4, &["a"], &["j1"]));
    s.ng_nodes.push(bare_ng("k2", 1.0e4, &["a"], &[]));
    s.ng_nodes.push(bare_ng("k3", 1.0e4, &["b"], &["j1"]));
    s.svl_nodes.push(svl_node("j1", 3.0e5, 5.0e3, 5.0e3));
    for n in ["a", "b"] {
        s.plant_sites.push(site(n, "CCGT", 0, 2));
        s.plant_sites.push(site(n, "OCGT", 0, 3));
        s.plant_sites.push(site(n, "solar-UPV", 0, 8));
        s.plant_sites.push(site(n, "wind-new", 0, 8));
    }
    s.plant_sites.push(site("a", "ng", 2, 0));
    s.lines.push(line("l1", "a", "b", true, 200.0, 0.0));
    s.lines.push(line("l2", "a", "b", false, 400.0, 1.0e8));
    s.pipelines.push(pipe("p1", "k1", "k2", true, 2.0e4, 0.0));
    s.pipelines.push(pipe("p2", "k1", "k3", true, 1.0e4, 0.0));
    s.pipelines.push(pipe("p3", "k1", "k3", false, 2.0e4, 5.34e6 * 20.0));
    let mut d = synthetic_demand(&s, 0.0, 0.0, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    d.elec.insert("a".into(), elec_profile(&mut rng, 3.5e6));
    d.elec.insert("b".into(), elec_profile(&mut rng, 2.0e6));
    d.gas.insert("k1".into(), gas_profile(&mut rng, 6.0e6));
    d.gas.insert("k2".into(), gas_profile(&mut rng, 2.5e6));
    d.gas.insert("k3".into(), gas_profile(&mut rng, 3.0e6));
    let grid = crate::timegrid::select_rep_days(&d.elec, &d.gas, 3, 7).expect("medium grid");
    let scenario = Scenario {
        name: "medium".into(),
        rep_days: 3,
        rps_level: 0.3,
        emissions_budget_tons: Some(1.0e6),
        ..Scenario::default()
    };
    finish("medium", s, d, grid, scenario)
}
