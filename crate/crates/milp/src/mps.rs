//! Free-format MPS writer and reader.
//!
//! Column order in the emitted file is: continuous variables in insertion
//! order, followed by every integer and binary variable inside a single
//! `INTORG`/`INTEND` marker pair. Bounds are always written explicitly for
//! integer columns so readers never fall back to a default `[0, 1]` box.
//! The objective constant is written as the negated RHS of the objective row.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::MilpError;
use crate::model::{ConId, Constraint, MilpModel, Sense, VarId, VarKind, Variable};

const OBJ_ROW: &str = "obj";

/// Formats a number so that parsing it back yields the identical `f64`.
pub fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// Column emission order: continuous first, integral variables last.
fn column_order(model: &MilpModel) -> Vec<VarId> {
    let (mut cont, ints): (Vec<VarId>, Vec<VarId>) = model
        .var_ids()
        .partition(|&v| !model.var(v).kind.is_integral());
    cont.extend(ints);
    cont
}

pub fn write_mps<W: Write>(model: &MilpModel, out: W) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "NAME {}", model.name())?;
    writeln!(w, "OBJSENSE")?;
    writeln!(w, "    MIN")?;
    writeln!(w, "ROWS")?;
    writeln!(w, " N  {OBJ_ROW}")?;
    for c in model.constraints() {
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        writeln!(w, " {tag}  {}", c.name)?;
    }

    // column-wise view of the row matrix
    let mut by_col: Vec<Vec<(ConId, f64)>> = vec![Vec::new(); model.num_vars()];
    for (ci, c) in model.constraints().iter().enumerate() {
        for &(v, coef) in &c.terms {
            by_col[v.index()].push((ConId(ci), coef));
        }
    }

    writeln!(w, "COLUMNS")?;
    let obj = model.objective_coefficients();
    let mut in_marker = false;
    let mut line = String::new();
    for v in column_order(model) {
        let var = model.var(v);
        if var.kind.is_integral() && !in_marker {
            writeln!(w, "    MARKER  'MARKER'  'INTORG'")?;
            in_marker = true;
        }
        let entries = &by_col[v.index()];
        let c = obj[v.index()];
        if c != 0.0 || entries.is_empty() {
            writeln!(w, "    {}  {OBJ_ROW}  {}", var.name, fmt_num(c))?;
        }
        for &(row, coef) in entries {
            line.clear();
            let _ = write!(
                line,
                "    {}  {}  {}",
                var.name,
                model.constraint(row).name,
                fmt_num(coef)
            );
            writeln!(w, "{line}")?;
        }
    }
    if in_marker {
        writeln!(w, "    MARKER  'MARKER'  'INTEND'")?;
    }

    writeln!(w, "RHS")?;
    if model.objective_offset() != 0.0 {
        writeln!(w, "    RHS  {OBJ_ROW}  {}", fmt_num(-model.objective_offset()))?;
    }
    for c in model.constraints() {
        if c.rhs != 0.0 {
            writeln!(w, "    RHS  {}  {}", c.name, fmt_num(c.rhs))?;
        }
    }

    writeln!(w, "BOUNDS")?;
    for v in column_order(model) {
        write_bounds(&mut w, model.var(v))?;
    }
    writeln!(w, "ENDATA")?;
    w.flush()
}

fn write_bounds<W: Write>(w: &mut W, v: &Variable) -> io::Result<()> {
    let n = &v.name;
    let (lo, hi) = (v.lower, v.upper);
    match v.kind {
        VarKind::Binary => writeln!(w, " BV BND  {n}"),
        _ if lo == hi => writeln!(w, " FX BND  {n}  {}", fmt_num(lo)),
        VarKind::Continuous => {
            if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                return writeln!(w, " FR BND  {n}");
            }
            if lo == f64::NEG_INFINITY {
                writeln!(w, " MI BND  {n}")?;
            } else if lo != 0.0 {
                writeln!(w, " LO BND  {n}  {}", fmt_num(lo))?;
            }
            if hi != f64::INFINITY {
                writeln!(w, " UP BND  {n}  {}", fmt_num(hi))?;
            }
            Ok(())
        }
        VarKind::Integer => {
            if lo == f64::NEG_INFINITY {
                writeln!(w, " MI BND  {n}")?;
            } else {
                writeln!(w, " LO BND  {n}  {}", fmt_num(lo))?;
            }
            if hi == f64::INFINITY {
                writeln!(w, " PL BND  {n}")
            } else {
                writeln!(w, " UP BND  {n}  {}", fmt_num(hi))
            }
        }
    }
}

pub fn to_mps_string(model: &MilpModel) -> String {
    let mut buf = Vec::new();
    write_mps(model, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("MPS output is ASCII/UTF-8")
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    ObjSense,
}

fn perr(line: usize, msg: impl Into<String>) -> MilpError {
    MilpError::Mps {
        line,
        msg: msg.into(),
    }
}

fn num(tok: &str, line: usize) -> Result<f64, MilpError> {
    tok.parse::<f64>()
        .map_err(|_| perr(line, format!("invalid number `{tok}`")))
}

/// Parses free-format MPS text into a model (minimization assumed, `MAX` negates).
pub fn parse_mps(text: &str) -> Result<MilpModel, MilpError> {
    let mut name = String::from("model");
    let mut section = Section::None;
    let mut obj_name: Option<String> = None;
    let mut maximize = false;

    let mut cons: Vec<Constraint> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut vars: Vec<Variable> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut offset = 0.0;
    let mut integer_block = false;
    let mut lower_set: Vec<bool> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let trimmed = raw.trim_end();
        if trimmed.trim().is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if header {
            match toks[0] {
                "NAME" => {
                    if let Some(n) = toks.get(1) {
                        name = (*n).to_string();
                    }
                    section = Section::None;
                }
                "OBJSENSE" => {
                    section = Section::ObjSense;
                    if let Some(s) = toks.get(1) {
                        maximize = s.starts_with("MAX");
                        section = Section::None;
                    }
                }
                "ROWS" => section = Section::Rows,
                "COLUMNS" => section = Section::Columns,
                "RHS" => section = Section::Rhs,
                "RANGES" => section = Section::Ranges,
                "BOUNDS" => section = Section::Bounds,
                "ENDATA" => break,
                other => return Err(perr(ln, format!("unknown section `{other}`"))),
            }
            continue;
        }
        match section {
            Section::ObjSense => {
                maximize = toks[0].starts_with("MAX");
            }
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(perr(ln, "ROWS entry needs type and name"));
                }
                let sense = match toks[0] {
                    "N" => {
                        if obj_name.is_none() {
                            obj_name = Some(toks[1].to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(perr(ln, format!("unknown row type `{t}`"))),
                };
                if row_index.insert(toks[1].to_string(), cons.len()).is_some() {
                    return Err(MilpError::DuplicateName(toks[1].to_string()));
                }
                cons.push(Constraint {
                    name: toks[1].to_string(),
                    terms: Vec::new(),
                    sense,
                    rhs: 0.0,
                });
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1].trim_matches('\'') == "MARKER" {
                    match toks[2].trim_matches('\'') {
                        "INTORG" => integer_block = true,
                        "INTEND" => integer_block = false,
                        m => return Err(perr(ln, format!("unknown marker `{m}`"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(perr(ln, "COLUMNS entry needs 1 or 2 (row, value) pairs"));
                }
                let col = match col_index.get(toks[0]) {
                    Some(&c) => c,
                    None => {
                        let c = vars.len();
                        col_index.insert(toks[0].to_string(), c);
                        vars.push(Variable {
                            name: toks[0].to_string(),
                            kind: if integer_block {
                                VarKind::Integer
                            } else {
                                VarKind::Continuous
                            },
                            lower: 0.0,
                            upper: f64::INFINITY,
                        });
                        objective.push(0.0);
                        lower_set.push(false);
                        c
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let val = num(pair[1], ln)?;
                    if Some(pair[0]) == obj_name.as_deref() {
                        objective[col] += val;
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| perr(ln, format!("unknown row `{}`", pair[0])))?;
                        if val != 0.0 {
                            cons[r].terms.push((VarId(col), val));
                        }
                    }
                }
            }
            Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(perr(ln, "RHS entry needs 1 or 2 (row, value) pairs"));
                }
                for pair in toks[1..].chunks(2) {
                    let val = num(pair[1], ln)?;
                    if Some(pair[0]) == obj_name.as_deref() {
                        offset = -val;
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| perr(ln, format!("unknown row `{}`", pair[0])))?;
                        cons[r].rhs = val;
                    }
                }
            }
            Section::Ranges => return Err(perr(ln, "RANGES section is not supported")),
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(perr(ln, "BOUNDS entry too short"));
                }
                let c = *col_index
                    .get(toks[2])
                    .ok_or_else(|| perr(ln, format!("unknown column `{}`", toks[2])))?;
                let value = || -> Result<f64, MilpError> {
                    toks.get(3)
                        .ok_or_else(|| perr(ln, "missing bound value"))
                        .and_then(|t| num(t, ln))
                };
                let v = &mut vars[c];
                match toks[0] {
                    "UP" => {
                        let x = value()?;
                        v.upper = x;
                        if x < 0.0 && v.lower == 0.0 && !lower_set[c] {
                            v.lower = f64::NEG_INFINITY;
                        }
                    }
                    "LO" => {
                        v.lower = value()?;
                        lower_set[c] = true;
                    }
                    "FX" => {
                        let x = value()?;
                        v.lower = x;
                        v.upper = x;
                    }
                    "FR" => {
                        v.lower = f64::NEG_INFINITY;
                        v.upper = f64::INFINITY;
                    }
                    "MI" => {
                        v.lower = f64::NEG_INFINITY;
                        lower_set[c] = true;
                    }
                    "PL" => v.upper = f64::INFINITY,
                    "BV" => {
                        v.kind = VarKind::Binary;
                        v.lower = 0.0;
                        v.upper = 1.0;
                    }
                    "LI" => {
                        v.kind = VarKind::Integer;
                        v.lower = value()?;
                        lower_set[c] = true;
                    }
                    "UI" => {
                        v.kind = VarKind::Integer;
                        v.upper = value()?;
                    }
                    t => return Err(perr(ln, format!("unknown bound type `{t}`"))),
                }
            }
            Section::None => return Err(perr(ln, "data line outside of a section")),
        }
    }

    if maximize {
        objective.iter_mut().for_each(|c| *c = -*c);
        offset = -offset;
    }
    MilpModel::from_parts(name, vars, cons, objective, offset)
}
