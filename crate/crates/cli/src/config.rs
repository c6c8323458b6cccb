use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use pgplan_core::scenario::DemandSet;
use pgplan_core::timegrid::{load_rep_days, select_rep_days};
use pgplan_core::topology::load_system;
use pgplan_core::{EnergySystem, Scenario, TimeGrid};
use serde::{Deserialize, Serialize};

/// Run configuration. Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Directory holding the topology CSVs.
    pub system: PathBuf,
    /// Demand-set name (e.g. `BAU`, `HE`) to directory.
    pub demand: BTreeMap<String, PathBuf>,
    /// Fixed representative days; k-medoids on the demand set when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repdays: Option<PathBuf>,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.system);
        cfg.demand.values_mut().for_each(fix);
        cfg.repdays.iter_mut().for_each(fix);
        cfg.out.iter_mut().for_each(fix);
        if cfg.demand.is_empty() {
            bail!("config lists no demand sets");
        }
        Ok(cfg)
    }
}

/// How the time grid for a run is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum RepDays {
    Select(usize),
    File(PathBuf),
}

impl std::str::FromStr for RepDays {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse() {
            Ok(k) => RepDays::Select(k),
            Err(_) => RepDays::File(PathBuf::from(s)),
        })
    }
}

/// Topology and demand sets, loaded once and shared read-only by every run.
pub struct Data {
    pub system: EnergySystem,
    pub demand: BTreeMap<String, DemandSet>,
    pub repdays: Option<PathBuf>,
}

impl Data {
    pub fn load(cfg: &Config, only: Option<&str>) -> Result<Self> {
        let system = load_system(&cfg.system)?;
        let mut demand = BTreeMap::new();
        for (name, dir) in &cfg.demand {
            if only.is_some_and(|o| o != name) {
                continue;
            }
            let d = DemandSet::load(dir).with_context(|| format!("demand set {name}"))?;
            demand.insert(name.clone(), d);
        }
        if let Some(o) = only {
            if demand.is_empty() {
                bail!("demand set `{o}` is not in the config");
            }
        }
        Ok(Self {
            system,
            demand,
            repdays: cfg.repdays.clone(),
        })
    }

    pub fn demand_for(&self, s: &Scenario) -> Result<&DemandSet> {
        self.demand
            .get(&s.demand)
            .ok_or_else(|| anyhow!("demand set `{}` is not in the config", s.demand))
    }

    /// Builds the grid for `s`, updating `s.rep_days` when a file fixes the count.
    pub fn grid_for(&self, s: &mut Scenario, repdays: Option<&RepDays>) -> Result<TimeGrid> {
        let d = self.demand_for(s)?;
        let grid = match (repdays, &self.repdays) {
            (Some(RepDays::Select(k)), _) => select_rep_days(&d.elec, &d.gas, *k, s.seed)?,
            (Some(RepDays::File(p)), _) | (None, Some(p)) => load_rep_days(p, &d.elec, &d.gas)?,
            (None, None) => select_rep_days(&d.elec, &d.gas, s.rep_days, s.seed)?,
        };
        s.rep_days = grid.num_rep();
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repdays_flag_is_count_or_path() {
        assert_eq!("30".parse::<RepDays>().unwrap(), RepDays::Select(30));
        assert_eq!(
            "days/rep.csv".parse::<RepDays>().unwrap(),
            RepDays::File("days/rep.csv".into())
        );
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let text = r#"{"system": "sys", "demand": {"BAU": "/abs/bau"}, "scenario": {"zeta": 0.9}}"#;
        std::fs::write(&path, text).unwrap();
        let cfg = Config::load(&path).unwrap();
        assert_eq!(cfg.system, dir.path().join("sys"));
        assert_eq!(cfg.demand["BAU"], PathBuf::from("/abs/bau"));
        assert_eq!(cfg.scenario.zeta, 0.9);
        assert_eq!(cfg.scenario.case, Scenario::default().case);
        assert!(cfg.out.is_none());
    }
}
