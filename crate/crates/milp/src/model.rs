//! In-memory representation of a mixed-integer linear program.
//!
//! Variables and constraints carry unique, stable names so that a model can
//! be serialized to MPS, handed to an external solver and matched back up
//! with the values in the returned solution file.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::MilpError;

/// Index of a variable inside a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Index of a constraint inside a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConId(pub(crate) usize);

impl ConId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// Left-hand side activity for a dense vector of variable values.
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which the row is violated (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A linear expression `Σ coef·var + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            terms: Vec::with_capacity(n),
            constant: 0.0,
        }
    }

    pub fn term(var: VarId, coef: f64) -> Self {
        Self {
            terms: vec![(var, coef)],
            constant: 0.0,
        }
    }

    pub fn add(&mut self, var: VarId, coef: f64) -> &mut Self {
        self.terms.push((var, coef));
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn extend(&mut self, other: &LinExpr, scale: f64) -> &mut Self {
        self.terms
            .extend(other.terms.iter().map(|&(v, c)| (v, c * scale)));
        self.constant += other.constant * scale;
        self
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(v, c)| c * values[v.0])
                .sum::<f64>()
    }

    /// Sort by variable and merge duplicate entries; exact zeros are dropped.
    fn normalized(mut self) -> Vec<(VarId, f64)> {
        self.terms.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|&(_, c)| c != 0.0);
        out
    }
}

/// Solver-agnostic MILP (always a minimization).
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    name: String,
    vars: Vec<Variable>,
    cons: Vec<Constraint>,
    objective: Vec<f64>,
    objective_offset: f64,
    var_index: HashMap<String, VarId>,
    con_index: HashMap<String, ConId>,
    metadata: BTreeMap<String, String>,
}

fn check_name(name: &str) -> Result<(), MilpError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(MilpError::InvalidName(name.to_string()));
    }
    Ok(())
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn name(&self) -> &str {
        if self.name.is_empty() {
            "model"
        } else {
            &self.name
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MilpError> {
        let name = name.into();
        check_name(&name)?;
        if lower.is_nan() || upper.is_nan() || lower == f64::INFINITY || upper == f64::NEG_INFINITY
        {
            return Err(MilpError::NonFiniteCoefficient(name));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        if lower > upper {
            return Err(MilpError::InvalidBounds { name, lower, upper });
        }
        if self.var_index.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        let id = VarId(self.vars.len());
        self.var_index.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConId, MilpError> {
        let name = name.into();
        check_name(&name)?;
        if !rhs.is_finite()
            || !expr.constant.is_finite()
            || expr.terms.iter().any(|(_, c)| !c.is_finite())
        {
            return Err(MilpError::NonFiniteCoefficient(name));
        }
        if let Some(&(v, _)) = expr.terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(MilpError::UnknownVariable(format!("#{}", v.0)));
        }
        if self.con_index.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        let rhs = rhs - expr.constant;
        let terms = expr.normalized();
        let id = ConId(self.cons.len());
        self.con_index.insert(name.clone(), id);
        self.cons.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(id)
    }

    /// Adds `coef` to the objective coefficient of `var`.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<(), MilpError> {
        if !coef.is_finite() {
            return Err(MilpError::NonFiniteCoefficient(self.vars[var.0].name.clone()));
        }
        self.objective[var.0] += coef;
        Ok(())
    }

    /// Adds every term of `expr` (including its constant) to the objective.
    pub fn add_objective(&mut self, expr: &LinExpr) -> Result<(), MilpError> {
        for &(v, c) in &expr.terms {
            self.add_objective_term(v, c)?;
        }
        self.add_objective_offset(expr.constant)
    }

    pub fn add_objective_offset(&mut self, c: f64) -> Result<(), MilpError> {
        if !c.is_finite() {
            return Err(MilpError::NonFiniteCoefficient("objective offset".into()));
        }
        self.objective_offset += c;
        Ok(())
    }

    /// Replaces the objective by `expr`.
    pub fn set_objective(&mut self, expr: &LinExpr) -> Result<(), MilpError> {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        self.objective_offset = 0.0;
        self.add_objective(expr)
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<(), MilpError> {
        let v = &mut self.vars[var.0];
        if lower > upper || lower.is_nan() || upper.is_nan() {
            return Err(MilpError::InvalidBounds {
                name: v.name.clone(),
                lower,
                upper,
            });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn fix(&mut self, var: VarId, value: f64) -> Result<(), MilpError> {
        self.set_bounds(var, value, value)
    }

    pub fn set_kind(&mut self, var: VarId, kind: VarKind) {
        self.vars[var.0].kind = kind;
    }

    /// Copy of the model with every integrality requirement dropped.
    pub fn relaxed(&self) -> Self {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.kind = VarKind::Continuous;
        }
        m
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn constraint(&self, id: ConId) -> &Constraint {
        &self.cons[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied()
    }

    pub fn con_id(&self, name: &str) -> Option<ConId> {
        self.con_index.get(name).copied()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn objective_coefficients(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.vars.iter().filter(|v| v.kind.is_integral()).count()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).map(VarId)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .zip(values)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }

    /// Largest bound or row violation of a dense point, with the offending name.
    pub fn max_violation(&self, values: &[f64]) -> (f64, Option<&str>) {
        let mut worst = (0.0, None);
        for (v, &x) in self.vars.iter().zip(values) {
            let viol = (v.lower - x).max(x - v.upper).max(0.0);
            if viol > worst.0 {
                worst = (viol, Some(v.name.as_str()));
            }
        }
        for c in &self.cons {
            let viol = c.violation(values);
            if viol > worst.0 {
                worst = (viol, Some(c.name.as_str()));
            }
        }
        worst
    }

    pub(crate) fn from_parts(
        name: String,
        vars: Vec<Variable>,
        cons: Vec<Constraint>,
        objective: Vec<f64>,
        objective_offset: f64,
    ) -> Result<Self, MilpError> {
        let mut var_index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if var_index.insert(v.name.clone(), VarId(i)).is_some() {
                return Err(MilpError::DuplicateName(v.name.clone()));
            }
        }
        let mut con_index = HashMap::with_capacity(cons.len());
        for (i, c) in cons.iter().enumerate() {
            if con_index.insert(c.name.clone(), ConId(i)).is_some() {
                return Err(MilpError::DuplicateName(c.name.clone()));
            }
        }
        Ok(Self {
            name,
            vars,
            cons,
            objective,
            objective_offset,
            var_index,
            con_index,
            metadata: BTreeMap::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        let mut m = MilpModel::new("t");
        m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY).unwrap();
        let err = m
            .add_var("x", VarKind::Integer, 0.0, 1.0)
            .unwrap_err();
        assert!(matches!(err, MilpError::DuplicateName(ref n) if n == "x"));

        let x = m.var_id("x").unwrap();
        m.add_constraint("c", LinExpr::term(x, 1.0), Sense::Le, 5.0)
            .unwrap();
        let err = m
            .add_constraint("c", LinExpr::term(x, 2.0), Sense::Le, 1.0)
            .unwrap_err();
        assert!(matches!(err, MilpError::DuplicateName(_)));
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let mut m = MilpModel::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        let err = m
            .add_constraint("c", LinExpr::term(x, f64::NAN), Sense::Le, 1.0)
            .unwrap_err();
        assert!(matches!(err, MilpError::NonFiniteCoefficient(_)));
        assert!(m.add_objective_term(x, f64::INFINITY).is_err());
        assert!(m
            .add_constraint("d", LinExpr::term(x, 1.0), Sense::Le, f64::INFINITY)
            .is_err());
    }

    #[test]
    fn names_with_whitespace_are_rejected() {
        let mut m = MilpModel::new("t");
        assert!(matches!(
            m.add_var("a b", VarKind::Continuous, 0.0, 1.0),
            Err(MilpError::InvalidName(_))
        ));
    }

    #[test]
    fn expression_terms_are_merged() {
        let mut m = MilpModel::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        let y = m.add_var("y", VarKind::Continuous, 0.0, 1.0).unwrap();
        let mut e = LinExpr::new();
        e.add(y, 1.0).add(x, 2.0).add(y, -1.0).add(x, 0.5).add_constant(3.0);
        let c = m.add_constraint("c", e, Sense::Eq, 4.0).unwrap();
        let row = m.constraint(c);
        assert_eq!(row.terms, vec![(x, 2.5)]);
        assert_eq!(row.rhs, 1.0);
    }

    #[test]
    fn binary_bounds_are_clamped() {
        let mut m = MilpModel::new("t");
        let z = m.add_var("z", VarKind::Binary, -3.0, 7.0).unwrap();
        assert_eq!((m.var(z).lower, m.var(z).upper), (0.0, 1.0));
    }

    #[test]
    fn inverted_bounds_are_rejected() {
        let mut m = MilpModel::new("t");
        assert!(matches!(
            m.add_var("x", VarKind::Continuous, 2.0, 1.0),
            Err(MilpError::InvalidBounds { .. })
        ));
    }
}
