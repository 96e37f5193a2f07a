//! Generic linear programs with named columns.
//!
//! Every relaxation, the exact solver's node problems and the big-M export
//! are expressed as a [`LinearModel`]. Constraints are sparse rows with an
//! explicit [`Sense`]; bounds live on the variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relation between a row's left-hand side and its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "EQ")]
    Eq,
}

impl Sense {
    /// Amount by which `lhs` violates `lhs <sense> rhs`; zero when satisfied.
    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Sense::Le => (lhs - rhs).max(0.0),
            Sense::Ge => (rhs - lhs).max(0.0),
            Sense::Eq => (lhs - rhs).abs(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "MAX")]
    Max,
    #[serde(rename = "MIN")]
    Min,
}

impl Direction {
    /// Maps an objective value onto a scale where larger is always better.
    pub fn score(self, value: f64) -> f64 {
        match self {
            Direction::Max => value,
            Direction::Min => -value,
        }
    }

    /// True when `a` is at least as good as `b` up to `tol`.
    pub fn at_least_as_good(self, a: f64, b: f64, tol: f64) -> bool {
        self.score(a) >= self.score(b) - tol
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Max => f.write_str("MAX"),
            Direction::Min => f.write_str("MIN"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// A sparse row `sum(coef * x[col]) <sense> rhs`.
///
/// Lazy rows belong to the model but the solver only activates them once the
/// current optimum violates them; the optimum reported is the optimum of the
/// full model either way.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub lazy: bool,
}

impl Constraint {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.sense.violation(self.lhs(x), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    direction: Direction,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
    var_index: HashMap<String, usize>,
}

impl LinearModel {
    pub fn new(direction: Direction) -> Self {
        LinearModel {
            direction,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            var_index: HashMap::new(),
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn num_cols(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Dense objective coefficients, one per column.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<usize> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidModel(format!("bad bounds [{lower}, {upper}] for `{name}`")));
        }
        if self.var_index.contains_key(&name) {
            return Err(Error::InvalidModel(format!("duplicate variable name `{name}`")));
        }
        let col = self.variables.len();
        self.var_index.insert(name.clone(), col);
        self.variables.push(Variable { name, lower, upper });
        self.objective.push(0.0);
        Ok(col)
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) -> Result<()> {
        let var = self
            .variables
            .get_mut(col)
            .ok_or_else(|| Error::InvalidModel(format!("column {col} out of range")))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::InvalidModel(format!("bad bounds [{lower}, {upper}] for `{}`", var.name)));
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    pub fn set_objective(&mut self, col: usize, coef: f64) {
        self.objective[col] = coef;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Result<usize> {
        self.push_constraint(terms, sense, rhs, false)
    }

    pub fn add_lazy_constraint(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Result<usize> {
        self.push_constraint(terms, sense, rhs, true)
    }

    fn push_constraint(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64, lazy: bool) -> Result<usize> {
        if !rhs.is_finite() {
            return Err(Error::InvalidModel(format!("non-finite rhs {rhs}")));
        }
        let terms = self.canonical_terms(terms)?;
        self.constraints.push(Constraint { terms, sense, rhs, lazy });
        Ok(self.constraints.len() - 1)
    }

    /// Sorts by column, merges repeated columns and drops exact zeros.
    fn canonical_terms(&self, mut terms: Vec<(usize, f64)>) -> Result<Vec<(usize, f64)>> {
        for &(j, a) in &terms {
            if j >= self.variables.len() {
                return Err(Error::InvalidModel(format!("coefficient references missing column {j}")));
            }
            if !a.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite coefficient {a} on column {j}")));
            }
        }
        terms.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        Ok(merged)
    }

    /// Marks the given lazy rows as ordinary rows.
    pub fn promote_lazy(&mut self, rows: &[usize]) {
        for &r in rows {
            if let Some(c) = self.constraints.get_mut(r) {
                c.lazy = false;
            }
        }
    }

    pub fn num_lazy(&self) -> usize {
        self.constraints.iter().filter(|c| c.lazy).count()
    }

    pub fn evaluate_objective(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over rows and bounds at `x`, with the offending item.
    pub fn max_violation(&self, x: &[f64]) -> (f64, Option<String>) {
        let mut worst = 0.0;
        let mut what = None;
        for (j, var) in self.variables.iter().enumerate() {
            let v = (var.lower - x[j]).max(x[j] - var.upper).max(0.0);
            if v > worst {
                worst = v;
                what = Some(format!("bound of `{}`", var.name));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let v = c.violation(x);
            if v > worst {
                worst = v;
                what = Some(format!("row {i}"));
            }
        }
        (worst, what)
    }

    /// Checks the structural invariants of the model.
    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.variables.len() {
            return Err(Error::InvalidModel("objective length differs from column count".into()));
        }
        for var in &self.variables {
            if var.lower > var.upper {
                return Err(Error::InvalidModel(format!("lower > upper on `{}`", var.name)));
            }
        }
        if let Some(c) = self.objective.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite objective coefficient {c}")));
        }
        Ok(())
    }

    pub fn named_assignment(&self, x: &[f64]) -> BTreeMap<String, f64> {
        self.variables
            .iter()
            .zip(x)
            .map(|(v, &val)| (v.name.clone(), val))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    #[serde(rename = "OPTIMAL")]
    Optimal,
    #[serde(rename = "INFEASIBLE")]
    Infeasible,
    #[serde(rename = "UNBOUNDED")]
    Unbounded,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unbounded => "UNBOUNDED",
        }
    }
}

/// Solver-independent view of a solve: status, value and named assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub value: Option<f64>,
    pub assignment: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        let mut m = LinearModel::new(Direction::Max);
        m.add_variable("x", 0.0, 1.0).unwrap();
        assert!(m.add_variable("x", 0.0, 1.0).is_err());
    }

    #[test]
    fn terms_are_merged_and_sorted() {
        let mut m = LinearModel::new(Direction::Max);
        let a = m.add_variable("a", 0.0, 1.0).unwrap();
        let b = m.add_variable("b", 0.0, 1.0).unwrap();
        m.add_constraint(vec![(b, 1.0), (a, 2.0), (b, -1.0), (a, 1.0)], Sense::Le, 3.0)
            .unwrap();
        assert_eq!(m.constraints()[0].terms, vec![(a, 3.0)]);
    }

    #[test]
    fn missing_column_is_rejected() {
        let mut m = LinearModel::new(Direction::Min);
        m.add_variable("a", 0.0, 1.0).unwrap();
        assert!(m.add_constraint(vec![(3, 1.0)], Sense::Le, 1.0).is_err());
        assert!(m.add_variable("b", 2.0, 1.0).is_err());
    }

    #[test]
    fn sense_violation() {
        assert_eq!(Sense::Le.violation(2.0, 1.0), 1.0);
        assert_eq!(Sense::Ge.violation(2.0, 1.0), 0.0);
        assert_eq!(Sense::Eq.violation(0.5, 1.0), 0.5);
    }
}
