//! Representative-day time structure.
//!
//! Hour slots are numbered `0..24*k`; slot `t` belongs to representative
//! `t / 24`. Calendar days are 0-based internally and 1-based in files.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csvio::{read_rows, write_rows};
use crate::error::TimeGridError;

pub const DAYS: usize = 365;
pub const HOURS: usize = 8760;
pub const DEFAULT_REP_DAYS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Calendar days (0-based, ascending) used as representatives.
    pub rep_days: Vec<usize>,
    /// Number of calendar days each representative stands for.
    pub weights: Vec<u32>,
    /// Calendar day -> representative index.
    pub day_of: Vec<usize>,
}

impl TimeGrid {
    /// Every day represents itself.
    pub fn full_year() -> Self {
        Self {
            rep_days: (0..DAYS).collect(),
            weights: vec![1; DAYS],
            day_of: (0..DAYS).collect(),
        }
    }

    pub fn from_parts(
        rep_days: Vec<usize>,
        day_of: Vec<usize>,
    ) -> Result<Self, TimeGridError> {
        let mut weights = vec![0u32; rep_days.len()];
        for &r in &day_of {
            if r >= rep_days.len() {
                return Err(TimeGridError::Invalid(format!("day mapped to unknown rep {r}")));
            }
            weights[r] += 1;
        }
        let g = Self {
            rep_days,
            weights,
            day_of,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), TimeGridError> {
        if self.day_of.len() != DAYS {
            return Err(TimeGridError::Invalid(format!(
                "day mapping covers {} days",
                self.day_of.len()
            )));
        }
        if self.rep_days.is_empty() {
            return Err(TimeGridError::Invalid("no representative days".into()));
        }
        if self.rep_days.windows(2).any(|w| w[0] >= w[1]) || *self.rep_days.last().unwrap() >= DAYS
        {
            return Err(TimeGridError::Invalid(
                "representative days must be distinct, ascending and < 365".into(),
            ));
        }
        for (r, &d) in self.rep_days.iter().enumerate() {
            if self.day_of[d] != r {
                return Err(TimeGridError::Invalid(format!(
                    "representative day {} is not mapped to itself",
                    d + 1
                )));
            }
        }
        if self.weights.iter().map(|&w| w as usize).sum::<usize>() != DAYS {
            return Err(TimeGridError::Invalid("weights do not sum to 365".into()));
        }
        Ok(())
    }

    pub fn num_rep(&self) -> usize {
        self.rep_days.len()
    }

    pub fn num_hours(&self) -> usize {
        24 * self.rep_days.len()
    }

    pub fn rep_of_hour(&self, t: usize) -> usize {
        t / 24
    }

    pub fn t_start(&self, r: usize) -> usize {
        24 * r
    }

    pub fn t_end(&self, r: usize) -> usize {
        24 * r + 23
    }

    pub fn is_day_start(&self, t: usize) -> bool {
        t % 24 == 0
    }

    /// Preceding slot within the same representative day (wraps to `t_end`).
    pub fn prev_hour(&self, t: usize) -> usize {
        if t % 24 == 0 {
            t + 23
        } else {
            t - 1
        }
    }

    /// Hour-of-year (0-based) that slot `t` stands for.
    pub fn phi(&self, t: usize) -> usize {
        self.rep_days[t / 24] * 24 + t % 24
    }

    pub fn hour_weight(&self, t: usize) -> f64 {
        self.weights[t / 24] as f64
    }

    pub fn hours_of_rep(&self, r: usize) -> std::ops::Range<usize> {
        24 * r..24 * r + 24
    }

    /// Writes `repdays.csv` (1-based day, weight).
    pub fn write_repdays(&self, path: &Path) -> Result<(), TimeGridError> {
        let rows: Vec<RepDayRow> = self
            .rep_days
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| RepDayRow { day: d + 1, weight: w })
            .collect();
        Ok(write_rows(path, &rows)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepDayRow {
    day: usize,
    weight: u32,
}

/// Per-day feature vectors: 24 hourly electric loads per node then the daily
/// gas load per node, each dimension z-scored over the year.
pub fn day_features(
    elec: &BTreeMap<String, Vec<f64>>,
    gas: &BTreeMap<String, Vec<f64>>,
) -> Result<Vec<Vec<f64>>, TimeGridError> {
    for (n, s) in elec {
        if s.len() != HOURS {
            return Err(TimeGridError::Invalid(format!(
                "electric demand for {n} has {} hours",
                s.len()
            )));
        }
    }
    for (k, s) in gas {
        if s.len() != DAYS {
            return Err(TimeGridError::Invalid(format!(
                "gas demand for {k} has {} days",
                s.len()
            )));
        }
    }
    let dim = 24 * elec.len() + gas.len();
    let mut feats = vec![Vec::with_capacity(dim); DAYS];
    for (d, f) in feats.iter_mut().enumerate() {
        for s in elec.values() {
            f.extend_from_slice(&s[24 * d..24 * d + 24]);
        }
        for s in gas.values() {
            f.push(s[d]);
        }
    }
    for j in 0..dim {
        let mean = feats.iter().map(|f| f[j]).sum::<f64>() / DAYS as f64;
        let var = feats.iter().map(|f| (f[j] - mean).powi(2)).sum::<f64>() / DAYS as f64;
        let sd = var.sqrt();
        for f in feats.iter_mut() {
            f[j] = if sd > 0.0 { (f[j] - mean) / sd } else { 0.0 };
        }
    }
    Ok(feats)
}

fn distance_matrix(feats: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = feats.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = feats[i]
                .iter()
                .zip(&feats[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

fn count_distinct(feats: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = feats
        .iter()
        .map(|f| f.iter().map(|x| x.to_bits()).collect())
        .collect();
    keys.sort();
    keys.dedup();
    keys.len()
}

/// Nearest medoid for each point, ties to the lower medoid day index.
fn assign(dist: &[Vec<f64>], medoids: &[usize]) -> Vec<usize> {
    let mut sorted = medoids.to_vec();
    sorted.sort_unstable();
    (0..dist.len())
        .map(|p| {
            if let Ok(i) = sorted.binary_search(&p) {
                return sorted[i];
            }
            let mut best = sorted[0];
            for &m in &sorted[1..] {
                if dist[p][m] < dist[p][best] {
                    best = m;
                }
            }
            best
        })
        .collect()
}

fn total_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..dist.len())
        .map(|p| medoids.iter().map(|&m| dist[p][m]).fold(f64::INFINITY, f64::min))
        .sum()
}

/// PAM: greedy build followed by first-improvement swaps.
fn pam(dist: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = dist.len();
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut near = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..n {
            if medoids.contains(&c) {
                continue;
            }
            let cost: f64 = (0..n).map(|p| near[p].min(dist[p][c])).sum();
            if best.map_or(true, |(b, _)| cost < b) {
                best = Some((cost, c));
            }
        }
        let c = best.unwrap().1;
        medoids.push(c);
        for p in 0..n {
            near[p] = near[p].min(dist[p][c]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cost = total_cost(dist, &medoids);
    loop {
        // nearest and second-nearest medoid distances
        let mut d1 = vec![f64::INFINITY; n];
        let mut d2 = vec![f64::INFINITY; n];
        let mut m1 = vec![0usize; n];
        for p in 0..n {
            for (mi, &m) in medoids.iter().enumerate() {
                let v = dist[p][m];
                if v < d1[p] {
                    d2[p] = d1[p];
                    d1[p] = v;
                    m1[p] = mi;
                } else if v < d2[p] {
                    d2[p] = v;
                }
            }
        }
        let mut pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|mi| (0..n).map(move |o| (mi, o)))
            .filter(|&(_, o)| !medoids.contains(&o))
            .collect();
        pairs.shuffle(&mut rng);
        let mut improved = false;
        for (mi, o) in pairs {
            let mut delta = 0.0;
            for p in 0..n {
                let dpo = dist[p][o];
                if m1[p] == mi {
                    delta += dpo.min(d2[p]) - d1[p];
                } else if dpo < d1[p] {
                    delta += dpo - d1[p];
                }
            }
            if delta < -1e-9 * cost.max(1.0) {
                medoids[mi] = o;
                cost += delta;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    medoids.sort_unstable();
    medoids
}

/// k-medoids selection of representative days.
pub fn select_rep_days(
    elec: &BTreeMap<String, Vec<f64>>,
    gas: &BTreeMap<String, Vec<f64>>,
    k: usize,
    seed: u64,
) -> Result<TimeGrid, TimeGridError> {
    if k == 0 || k > DAYS {
        return Err(TimeGridError::Invalid(format!("k must be in 1..=365, got {k}")));
    }
    let feats = day_features(elec, gas)?;
    if k == DAYS {
        return Ok(TimeGrid::full_year());
    }
    let distinct = count_distinct(&feats);
    if k > distinct {
        return Err(TimeGridError::DegenerateInput { k, distinct });
    }
    let dist = distance_matrix(&feats);
    let medoids = pam(&dist, k, seed);
    let owner = assign(&dist, &medoids);
    let day_of = owner
        .iter()
        .map(|m| medoids.binary_search(m).unwrap())
        .collect();
    TimeGrid::from_parts(medoids, day_of)
}

/// Loads a fixed set of representative days from `repdays.csv` and assigns
/// calendar days to them by nearest feature distance subject to the weights.
pub fn load_rep_days(
    path: &Path,
    elec: &BTreeMap<String, Vec<f64>>,
    gas: &BTreeMap<String, Vec<f64>>,
) -> Result<TimeGrid, TimeGridError> {
    let mut rows: Vec<RepDayRow> = read_rows(path)?;
    rows.sort_by_key(|r| r.day);
    let file = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    for (i, r) in rows.iter().enumerate() {
        if r.day == 0 || r.day > DAYS || r.weight == 0 {
            return Err(TimeGridError::SchemaViolation {
                file: file.clone(),
                row: i as u64 + 2,
                msg: format!("day {} weight {} out of range", r.day, r.weight),
            });
        }
    }
    if rows.windows(2).any(|w| w[0].day == w[1].day) {
        return Err(TimeGridError::Invalid("duplicate representative day".into()));
    }
    let total: u32 = rows.iter().map(|r| r.weight).sum();
    if total as usize != DAYS {
        return Err(TimeGridError::Invalid(format!("weights sum to {total}, expected 365")));
    }
    let rep_days: Vec<usize> = rows.iter().map(|r| r.day - 1).collect();
    let mut left: Vec<u32> = rows.iter().map(|r| r.weight - 1).collect();
    let mut day_of = vec![usize::MAX; DAYS];
    for (r, &d) in rep_days.iter().enumerate() {
        day_of[d] = r;
    }
    let feats = day_features(elec, gas)?;
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for d in 0..DAYS {
        if day_of[d] != usize::MAX {
            continue;
        }
        for (r, &rd) in rep_days.iter().enumerate() {
            let v: f64 = feats[d]
                .iter()
                .zip(&feats[rd])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            cand.push((v, d, r));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, d, r) in cand {
        if day_of[d] == usize::MAX && left[r] > 0 {
            day_of[d] = r;
            left[r] -= 1;
        }
    }
    TimeGrid::from_parts(rep_days, day_of)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LdcDiagnostic {
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
    pub max_abs_gap: f64,
    pub mean_abs_gap: f64,
}

#[derive(Serialize)]
struct LdcRow {
    rank: usize,
    exact_mw: f64,
    approx_mw: f64,
}

impl LdcDiagnostic {
    pub fn write_csv(&self, path: &Path) -> Result<(), TimeGridError> {
        let rows: Vec<LdcRow> = self
            .exact
            .iter()
            .zip(&self.approx)
            .enumerate()
            .map(|(i, (&e, &a))| LdcRow {
                rank: i + 1,
                exact_mw: e,
                approx_mw: a,
            })
            .collect();
        Ok(write_rows(path, &rows)?)
    }
}

/// Compares the system-wide load-duration curve with its rep-day approximation.
pub fn load_duration_diagnostic(
    grid: &TimeGrid,
    elec: &BTreeMap<String, Vec<f64>>,
) -> LdcDiagnostic {
    let mut total = vec![0.0; HOURS];
    for s in elec.values() {
        for (h, v) in s.iter().enumerate().take(HOURS) {
            total[h] += v;
        }
    }
    let mut approx: Vec<f64> = (0..HOURS)
        .map(|h| {
            let rep = grid.rep_days[grid.day_of[h / 24]];
            total[rep * 24 + h % 24]
        })
        .collect();
    let mut exact = total;
    exact.sort_by(|a, b| b.total_cmp(a));
    approx.sort_by(|a, b| b.total_cmp(a));
    let gaps: Vec<f64> = exact.iter().zip(&approx).map(|(a, b)| (a - b).abs()).collect();
    LdcDiagnostic {
        max_abs_gap: gaps.iter().cloned().fold(0.0, f64::max),
        mean_abs_gap: gaps.iter().sum::<f64>() / HOURS as f64,
        exact,
        approx,
    }
}
