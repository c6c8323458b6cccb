use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::SolveError;
use crate::model::MilpModel;
use crate::mps::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// A feasible incumbent was returned but the requested gap was not reached.
    FeasibleGap,
    Infeasible,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleGap)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleGap => "feasible_gap",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "optimal" => SolveStatus::Optimal,
            "feasible_gap" | "feasible" => SolveStatus::FeasibleGap,
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            "error" => SolveStatus::Error,
            other => return Err(format!("unknown status `{other}`")),
        })
    }
}

/// Result of a solve, keyed by variable name.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub mip_gap: Option<f64>,
    pub values: HashMap<String, f64>,
    pub solve_seconds: f64,
}

impl Solution {
    pub fn without_values(status: SolveStatus) -> Self {
        Self {
            status,
            objective: None,
            mip_gap: None,
            values: HashMap::new(),
            solve_seconds: 0.0,
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Dense value vector in model column order; missing names are reported.
    pub fn dense(&self, model: &MilpModel) -> Result<Vec<f64>, String> {
        model
            .variables()
            .iter()
            .map(|v| self.value(&v.name).ok_or_else(|| v.name.clone()))
            .collect()
    }

    /// Writes the native solution format: sentinels followed by `<name> <value>` lines
    /// in model column order.
    pub fn write_native<W: Write>(&self, model: &MilpModel, out: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(out);
        writeln!(w, "=status= {}", self.status)?;
        if let Some(obj) = self.objective {
            writeln!(w, "=obj= {}", fmt_num(obj))?;
        }
        if let Some(gap) = self.mip_gap {
            writeln!(w, "=gap= {}", fmt_num(gap))?;
        }
        for v in model.variables() {
            if let Some(x) = self.value(&v.name) {
                writeln!(w, "{} {}", v.name, fmt_num(x))?;
            }
        }
        w.flush()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> SolveError {
    SolveError::ParseError {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, SolveError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))
}

/// Parses the native `<name> <value>` format with `=status=`, `=obj=` and
/// optional `=gap=` sentinels.
pub fn parse_native(text: &str) -> Result<Solution, SolveError> {
    let mut status = None;
    let mut objective = None;
    let mut mip_gap = None;
    let mut values = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(key), Some(val), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(parse_err(ln, "expected `<name> <value>`"));
        };
        match key {
            "=status=" => status = Some(val.parse().map_err(|e: String| parse_err(ln, e))?),
            "=obj=" => objective = Some(parse_f64(val, ln)?),
            "=gap=" => mip_gap = Some(parse_f64(val, ln)?),
            name => {
                if values.insert(name.to_string(), parse_f64(val, ln)?).is_some() {
                    return Err(parse_err(ln, format!("duplicate variable `{name}`")));
                }
            }
        }
    }
    let status = status.ok_or_else(|| parse_err(0, "missing `=status=` sentinel"))?;
    Ok(Solution {
        status,
        objective,
        mip_gap,
        values,
        solve_seconds: 0.0,
    })
}

/// Parses a CBC `solu` file (`Optimal - objective value X` then indexed rows).
pub fn parse_cbc(text: &str) -> Result<Solution, SolveError> {
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let lower = head.to_ascii_lowercase();
    let status = if lower.starts_with("optimal") {
        SolveStatus::Optimal
    } else if lower.contains("infeasible") {
        SolveStatus::Infeasible
    } else if lower.contains("unbounded") {
        SolveStatus::Unbounded
    } else if lower.starts_with("stopped") {
        SolveStatus::FeasibleGap
    } else {
        SolveStatus::Error
    };
    let objective = head
        .rsplit("objective value")
        .next()
        .filter(|_| lower.contains("objective value"))
        .and_then(|s| s.trim().parse().ok());
    let mut values = HashMap::new();
    for (i, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        // "**" prefixes entries that are infeasible in CBC output
        let toks: Vec<&str> = toks.into_iter().filter(|t| *t != "**").collect();
        if toks.len() < 3 {
            return Err(parse_err(i + 1, "expected `<index> <name> <value> ...`"));
        }
        values.insert(toks[1].to_string(), parse_f64(toks[2], i + 1)?);
    }
    Ok(Solution {
        status,
        objective,
        mip_gap: None,
        values,
        solve_seconds: 0.0,
    })
}

/// Parses the HiGHS command-line solution file (raw format).
pub fn parse_highs(text: &str) -> Result<Solution, SolveError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut status = SolveStatus::Error;
    let mut objective = None;
    let mut values = HashMap::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].trim();
        if line == "Model status" {
            let s = lines.get(i + 1).map(|s| s.trim()).unwrap_or("");
            status = match s {
                "Optimal" => SolveStatus::Optimal,
                "Infeasible" => SolveStatus::Infeasible,
                "Unbounded" | "Primal infeasible or unbounded" => SolveStatus::Unbounded,
                "Time limit reached" | "Iteration limit reached" => SolveStatus::FeasibleGap,
                _ => SolveStatus::Error,
            };
            i += 2;
            continue;
        }
        if let Some(rest) = line.strip_prefix("Objective") {
            objective = rest.trim().parse().ok();
        }
        if let Some(rest) = line.strip_prefix("# Columns") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(i + 1, "invalid column count"))?;
            for k in 0..n {
                let ln = i + 2 + k;
                let row = lines
                    .get(ln - 1)
                    .ok_or_else(|| parse_err(ln, "truncated column block"))?;
                let toks: Vec<&str> = row.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(parse_err(ln, "expected `<name> <value>`"));
                }
                values.insert(toks[0].to_string(), parse_f64(toks[1], ln)?);
            }
            // primal block only; dual values follow in a later section
            break;
        }
        i += 1;
    }
    Ok(Solution {
        status,
        objective,
        mip_gap: None,
        values,
        solve_seconds: 0.0,
    })
}
