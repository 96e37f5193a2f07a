//! LPCC instances: data, normalization, validation and JSON files.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::linear::{Direction, Sense};
use crate::tol;

/// One linear row `cx·x + cy·y <sense> rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cx: Vec<f64>,
    pub cy: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn lhs(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(&self.cx, x) + dot(&self.cy, y)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// A linear program with complementarity constraints over a conflict graph.
///
/// `x` is free; `y` lives in `[0, y_upper]`. Edges are 0-based index pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpccInstance {
    pub direction: Direction,
    pub num_x: usize,
    pub num_y: usize,
    #[serde(rename = "obj_x")]
    pub objective_x: Vec<f64>,
    #[serde(rename = "obj_y")]
    pub objective_y: Vec<f64>,
    pub rows: Vec<Row>,
    pub y_upper: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
}

/// A single broken instance invariant, as reported by [`LpccInstance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LoopEdge(usize),
    DuplicateEdge(usize, usize),
    IndexOutOfRange { edge: (usize, usize), n: usize },
    NonPositiveBound { index: usize, value: f64 },
    DimensionMismatch { what: String, expected: usize, got: usize },
    NonFinite(String),
    NoYVariables,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LoopEdge(i) => write!(f, "loop edge at y[{}]", i + 1),
            Violation::DuplicateEdge(i, j) => write!(f, "duplicate edge {{{}, {}}}", i + 1, j + 1),
            Violation::IndexOutOfRange { edge, n } => {
                write!(f, "edge ({}, {}) out of range for n = {n}", edge.0, edge.1)
            }
            Violation::NonPositiveBound { index, value } => {
                write!(f, "y upper bound {value} at y[{}] is not positive", index + 1)
            }
            Violation::DimensionMismatch { what, expected, got } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            Violation::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Violation::NoYVariables => f.write_str("instance has no y variables"),
        }
    }
}

/// Feasibility of a point `(x, y)` for the LPCC.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `rhs - lhs` for every row (sign meaning depends on the row sense).
    pub row_slack: Vec<f64>,
    /// Rows violated by more than the feasibility tolerance, with the violation.
    pub row_violations: Vec<(usize, f64)>,
    /// y indices outside `[0, y_upper]`, with the violation.
    pub bound_violations: Vec<(usize, f64)>,
    /// Edges `(i, j)` with `y_i * y_j` above the complementarity tolerance, with the product.
    pub complementarity_violations: Vec<(usize, usize, f64)>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.row_violations.is_empty()
            && self.bound_violations.is_empty()
            && self.complementarity_violations.is_empty()
    }
}

impl LpccInstance {
    /// An instance with zero objective, no rows, no edges and unit y bounds.
    pub fn new(direction: Direction, num_x: usize, num_y: usize) -> Self {
        LpccInstance {
            direction,
            num_x,
            num_y,
            objective_x: vec![0.0; num_x],
            objective_y: vec![0.0; num_y],
            rows: Vec::new(),
            y_upper: vec![1.0; num_y],
            edges: Vec::new(),
        }
    }

    pub fn add_row(&mut self, cx: Vec<f64>, cy: Vec<f64>, sense: Sense, rhs: f64) -> Result<()> {
        if cx.len() != self.num_x {
            return Err(Error::DimensionMismatch { what: "row cx", expected: self.num_x, got: cx.len() });
        }
        if cy.len() != self.num_y {
            return Err(Error::DimensionMismatch { what: "row cy", expected: self.num_y, got: cy.len() });
        }
        self.rows.push(Row { cx, cy, sense, rhs });
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(&self.objective_x, x) + dot(&self.objective_y, y)
    }

    /// The conflict graph on the y indices. Requires a valid edge list.
    pub fn conflict_graph(&self) -> Result<ConflictGraph> {
        ConflictGraph::new(self.num_y, &self.edges)
    }

    /// Every broken invariant; empty iff the instance is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.num_y;
        if n == 0 {
            out.push(Violation::NoYVariables);
        }
        let mut dim = |what: &str, expected: usize, got: usize| {
            if expected != got {
                out.push(Violation::DimensionMismatch { what: what.to_string(), expected, got });
            }
        };
        dim("obj_x", self.num_x, self.objective_x.len());
        dim("obj_y", n, self.objective_y.len());
        dim("y_upper", n, self.y_upper.len());
        for (k, row) in self.rows.iter().enumerate() {
            dim(&format!("row {k} cx"), self.num_x, row.cx.len());
            dim(&format!("row {k} cy"), n, row.cy.len());
        }
        for (index, &value) in self.y_upper.iter().enumerate() {
            if !(value > 0.0) {
                out.push(Violation::NonPositiveBound { index, value });
            }
        }
        if self.objective_x.iter().chain(&self.objective_y).any(|v| !v.is_finite()) {
            out.push(Violation::NonFinite("objective".into()));
        }
        if self.y_upper.iter().any(|v| !v.is_finite()) {
            out.push(Violation::NonFinite("y_upper".into()));
        }
        for (k, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() || row.cx.iter().chain(&row.cy).any(|v| !v.is_finite()) {
                out.push(Violation::NonFinite(format!("row {k}")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &self.edges {
            if i >= n || j >= n {
                out.push(Violation::IndexOutOfRange { edge: (i, j), n });
            } else if i == j {
                out.push(Violation::LoopEdge(i));
            } else if !seen.insert((i.min(j), i.max(j))) {
                out.push(Violation::DuplicateEdge(i.min(j), i.max(j)));
            }
        }
        out
    }

    /// Rescales every y column so that all y upper bounds become 1.
    pub fn normalize(&self) -> Result<LpccInstance> {
        for (index, &value) in self.y_upper.iter().enumerate() {
            if !(value > 0.0) {
                return Err(Error::NonPositiveBound { index, value });
            }
        }
        let u = &self.y_upper;
        let mut out = self.clone();
        for (j, b) in out.objective_y.iter_mut().enumerate() {
            *b *= u[j];
        }
        for row in &mut out.rows {
            for (j, c) in row.cy.iter_mut().enumerate() {
                *c *= u[j];
            }
        }
        out.y_upper = vec![1.0; self.num_y];
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        self.y_upper.iter().all(|&u| u == 1.0)
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<FeasibilityReport> {
        if x.len() != self.num_x {
            return Err(Error::DimensionMismatch { what: "x", expected: self.num_x, got: x.len() });
        }
        if y.len() != self.num_y {
            return Err(Error::DimensionMismatch { what: "y", expected: self.num_y, got: y.len() });
        }
        let mut report = FeasibilityReport {
            row_slack: Vec::with_capacity(self.rows.len()),
            row_violations: Vec::new(),
            bound_violations: Vec::new(),
            complementarity_violations: Vec::new(),
        };
        for (k, row) in self.rows.iter().enumerate() {
            let lhs = row.lhs(x, y);
            report.row_slack.push(row.rhs - lhs);
            let v = row.sense.violation(lhs, row.rhs);
            if v > tol::FEAS {
                report.row_violations.push((k, v));
            }
        }
        for (j, &yj) in y.iter().enumerate() {
            let v = (-yj).max(yj - self.y_upper[j]);
            if v > tol::FEAS {
                report.bound_violations.push((j, v));
            }
        }
        for &(i, j) in &self.edges {
            let prod = y[i] * y[j];
            if prod > tol::COMPLEMENTARITY {
                report.complementarity_violations.push((i, j, prod));
            }
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<LpccInstance> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<LpccInstance> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LpccInstance> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var() -> LpccInstance {
        let mut inst = LpccInstance::new(Direction::Max, 0, 2);
        inst.edges.push((0, 1));
        inst
    }

    #[test]
    fn normalize_scales_columns() {
        let mut inst = LpccInstance::new(Direction::Max, 0, 1);
        inst.objective_y = vec![3.0];
        inst.y_upper = vec![2.0];
        inst.add_row(vec![], vec![1.0], Sense::Le, 2.0).unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.y_upper, vec![1.0]);
        assert_eq!(norm.objective_y, vec![6.0]);
        assert_eq!(norm.rows[0].cy, vec![2.0]);
        assert_eq!(norm.normalize().unwrap(), norm);
    }

    #[test]
    fn normalize_rejects_non_positive_bound() {
        let mut inst = LpccInstance::new(Direction::Max, 0, 2);
        inst.y_upper = vec![1.0, 0.0];
        assert!(matches!(inst.normalize(), Err(Error::NonPositiveBound { index: 1, .. })));
    }

    #[test]
    fn unit_bounds_are_unchanged() {
        let inst = two_var();
        assert_eq!(inst.normalize().unwrap(), inst);
    }

    #[test]
    fn validate_reports_loops_and_ranges() {
        let mut inst = LpccInstance::new(Direction::Max, 0, 4);
        inst.edges.push((3, 3));
        assert_eq!(inst.validate(), vec![Violation::LoopEdge(3)]);
        inst.edges = vec![(0, 4)];
        assert!(matches!(inst.validate()[..], [Violation::IndexOutOfRange { .. }]));
        inst.edges = vec![(0, 1), (1, 0)];
        assert_eq!(inst.validate(), vec![Violation::DuplicateEdge(0, 1)]);
    }

    #[test]
    fn complementarity_tolerance() {
        let inst = two_var();
        assert!(inst.evaluate(&[], &[1.0, 0.0]).unwrap().is_feasible());
        let r = inst.evaluate(&[], &[0.5, 0.5]).unwrap();
        assert_eq!(r.complementarity_violations, vec![(0, 1, 0.25)]);
        assert!(inst.evaluate(&[], &[1e-5, 1e-5]).unwrap().is_feasible());
        assert!(inst.evaluate(&[], &[1.0]).is_err());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut inst = LpccInstance::new(Direction::Min, 1, 2);
        inst.objective_x = vec![0.1];
        inst.objective_y = vec![1.0 / 3.0, -2.5e-17];
        inst.add_row(vec![std::f64::consts::PI], vec![0.3, 7.0], Sense::Eq, 1e300).unwrap();
        inst.edges.push((0, 1));
        let text = inst.to_json().unwrap();
        assert!(text.contains("\"obj_x\""));
        assert!(text.contains("\"EQ\""));
        let back = LpccInstance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json().unwrap(), text);
    }
}
