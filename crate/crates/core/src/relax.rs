//! The three relaxations of an LPCC as [`LinearModel`]s.
//!
//! * [`build_lp_relaxation`]: drop the complementarity constraints.
//! * [`build_edge_relaxation`]: one disjunction `y_i = 0 or y_j = 0` per edge.
//! * [`build_cover_relaxation`]: one disjunction per group `T` of a feasible
//!   cover partition, between `y(delta(T)) = 0` (weight `q_T`) and
//!   `y(T) = 0` (weight `qbar_T`).
//!
//! Each disjunction is written in Balas' extended form: the point `(x, y)` is
//! split into `(u, v)` scaled by `q` and `(ubar, vbar)` scaled by `qbar`, and
//! every instance row is imposed on both parts. Components forced to zero by
//! a side of the disjunction are not created as columns; they are recorded
//! in [`RelaxationArtifact::eliminated`] instead.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use crate::cuts::CutFamily;
use crate::error::{Error, Result};
use crate::exact::{self, ExactOptions, ExactStatus};
use crate::graph::{approx_min_vertex_cover, feasible_cover_partition, CoverPartition};
use crate::instance::LpccInstance;
use crate::linear::{Direction, LinearModel, Sense};
use crate::lp;
use crate::varkey::{Group, VarKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelaxationKind {
    Lp,
    Edge,
    Cover,
}

/// One disjunction: either `y(neighborhood) = 0` or `y(members) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub group: Group,
    pub members: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

impl Block {
    /// `v[group, j]` is fixed to zero.
    pub fn v_eliminated(&self, j: usize) -> bool {
        self.neighborhood.binary_search(&j).is_ok()
    }

    /// `vbar[group, j]` is fixed to zero.
    pub fn vbar_eliminated(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    /// `q` of the explicit lift: `y(T) / (y(T) + y(delta(T)))`, or 0.
    pub fn lift_q(&self, y: &[f64]) -> f64 {
        let inside: f64 = self.members.iter().map(|&i| y[i]).sum();
        let outside: f64 = self.neighborhood.iter().map(|&j| y[j]).sum();
        if inside + outside == 0.0 {
            0.0
        } else {
            inside / (inside + outside)
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationArtifact {
    pub model: LinearModel,
    pub kind: RelaxationKind,
    pub partition: Option<CoverPartition>,
    pub blocks: Vec<Block>,
    pub key_map: BTreeMap<VarKey, usize>,
    pub eliminated: BTreeSet<VarKey>,
    pub num_x: usize,
    pub num_y: usize,
    /// Fingerprints of cut rows already in the model.
    pub(crate) cut_fingerprints: BTreeSet<Vec<u64>>,
    pub cut_counts: BTreeMap<CutFamily, usize>,
}

impl RelaxationArtifact {
    fn new(kind: RelaxationKind, direction: Direction, num_x: usize, num_y: usize) -> Self {
        RelaxationArtifact {
            model: LinearModel::new(direction),
            kind,
            partition: None,
            blocks: Vec::new(),
            key_map: BTreeMap::new(),
            eliminated: BTreeSet::new(),
            num_x,
            num_y,
            cut_fingerprints: BTreeSet::new(),
            cut_counts: BTreeMap::new(),
        }
    }

    fn add_column(&mut self, key: VarKey, lower: f64, upper: f64) -> Result<usize> {
        let col = self.model.add_variable(key.to_string(), lower, upper)?;
        self.key_map.insert(key, col);
        Ok(col)
    }

    pub fn column(&self, key: &VarKey) -> Option<usize> {
        self.key_map.get(key).copied()
    }

    /// Value of `key` in the column vector `x`; eliminated keys read as 0.
    pub fn value(&self, x: &[f64], key: &VarKey) -> Result<f64> {
        match self.key_map.get(key) {
            Some(&c) => Ok(x[c]),
            None if self.eliminated.contains(key) => Ok(0.0),
            None => Err(Error::UnknownVariable(key.to_string())),
        }
    }

    /// Columns plus eliminated keys: the dimension of the space the blocks live in.
    pub fn ambient_dimension(&self) -> usize {
        self.model.num_cols() + self.eliminated.len()
    }

    /// Extracts `(x, y)` from a column vector.
    pub fn project(&self, cols: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x = (0..self.num_x).map(|l| cols[self.key_map[&VarKey::X(l)]]).collect();
        let y = (0..self.num_y).map(|j| cols[self.key_map[&VarKey::Y(j)]]).collect();
        (x, y)
    }

    /// The explicit lift of an LPCC-feasible `(x, y)`: `q` from
    /// [`Block::lift_q`], `u = q x`, `ubar = (1 - q) x`, `v = q y`,
    /// `vbar = (1 - q) y`.
    pub fn lift(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.model.num_cols()];
        let mut q = BTreeMap::new();
        for b in &self.blocks {
            q.insert(b.group, b.lift_q(y));
        }
        for (key, &col) in &self.key_map {
            out[col] = match *key {
                VarKey::X(l) => x[l],
                VarKey::Y(j) => y[j],
                VarKey::Z(_) => 0.0,
                VarKey::Q(g) => q[&g],
                VarKey::QBar(g) => 1.0 - q[&g],
                VarKey::U(g, l) => q[&g] * x[l],
                VarKey::UBar(g, l) => (1.0 - q[&g]) * x[l],
                VarKey::V(g, j) => q[&g] * y[j],
                VarKey::VBar(g, j) => (1.0 - q[&g]) * y[j],
            };
        }
        out
    }
}

fn require_normalized(inst: &LpccInstance) -> Result<()> {
    let problems = inst.validate();
    if let Some(p) = problems.first() {
        return Err(Error::InvalidModel(format!("invalid instance: {p}")));
    }
    if !inst.is_normalized() {
        return Err(Error::InvalidModel("extended relaxations need unit y bounds; call normalize() first".into()));
    }
    Ok(())
}

/// Adds `x`, `y`, the objective and the instance rows.
fn add_base(art: &mut RelaxationArtifact, inst: &LpccInstance) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut xc = Vec::with_capacity(inst.num_x);
    for l in 0..inst.num_x {
        let c = art.add_column(VarKey::X(l), f64::NEG_INFINITY, f64::INFINITY)?;
        art.model.set_objective(c, inst.objective_x[l]);
        xc.push(c);
    }
    let mut yc = Vec::with_capacity(inst.num_y);
    for j in 0..inst.num_y {
        let c = art.add_column(VarKey::Y(j), 0.0, inst.y_upper[j])?;
        art.model.set_objective(c, inst.objective_y[j]);
        yc.push(c);
    }
    let ycols: Vec<Option<usize>> = yc.iter().map(|&c| Some(c)).collect();
    for row in &inst.rows {
        let terms = row_terms(&row.cx, &row.cy, &xc, &ycols, None);
        art.model.add_constraint(terms, row.sense, row.rhs)?;
    }
    Ok((xc, yc))
}

/// `cx·x + cy·y` over the given columns, with `-rhs * scale` appended when given.
fn row_terms(
    cx: &[f64],
    cy: &[f64],
    xc: &[usize],
    yc: &[Option<usize>],
    scale: Option<(usize, f64)>,
) -> Vec<(usize, f64)> {
    let mut terms: Vec<(usize, f64)> = Vec::with_capacity(cx.len() + cy.len() + 1);
    terms.extend(cx.iter().zip(xc).filter(|(a, _)| **a != 0.0).map(|(&a, &c)| (c, a)));
    terms.extend(
        cy.iter()
            .zip(yc)
            .filter_map(|(&a, c)| c.map(|c| (c, a)))
            .filter(|&(_, a)| a != 0.0),
    );
    if let Some((col, rhs)) = scale {
        if rhs != 0.0 {
            terms.push((col, -rhs));
        }
    }
    terms
}

fn add_block(
    art: &mut RelaxationArtifact,
    inst: &LpccInstance,
    block: &Block,
    xc: &[usize],
    yc: &[usize],
) -> Result<()> {
    let g = block.group;
    let (p, n) = (inst.num_x, inst.num_y);
    let q = art.add_column(VarKey::Q(g), 0.0, f64::INFINITY)?;
    let qbar = art.add_column(VarKey::QBar(g), 0.0, f64::INFINITY)?;
    let mut u = Vec::with_capacity(p);
    let mut ubar = Vec::with_capacity(p);
    for l in 0..p {
        u.push(art.add_column(VarKey::U(g, l), f64::NEG_INFINITY, f64::INFINITY)?);
    }
    for l in 0..p {
        ubar.push(art.add_column(VarKey::UBar(g, l), f64::NEG_INFINITY, f64::INFINITY)?);
    }
    let mut v = vec![None; n];
    let mut vbar = vec![None; n];
    for j in 0..n {
        if block.v_eliminated(j) {
            art.eliminated.insert(VarKey::V(g, j));
        } else {
            v[j] = Some(art.add_column(VarKey::V(g, j), 0.0, f64::INFINITY)?);
        }
    }
    for j in 0..n {
        if block.vbar_eliminated(j) {
            art.eliminated.insert(VarKey::VBar(g, j));
        } else {
            vbar[j] = Some(art.add_column(VarKey::VBar(g, j), 0.0, f64::INFINITY)?);
        }
    }
    // A u + B v <sense> d q, and the same on the complementary side
    for row in &inst.rows {
        let terms = row_terms(&row.cx, &row.cy, &u, &v, Some((q, row.rhs)));
        art.model.add_constraint(terms, row.sense, 0.0)?;
    }
    for row in &inst.rows {
        let terms = row_terms(&row.cx, &row.cy, &ubar, &vbar, Some((qbar, row.rhs)));
        art.model.add_constraint(terms, row.sense, 0.0)?;
    }
    // v <= q, vbar <= qbar
    for c in v.iter().flatten() {
        art.model.add_constraint(vec![(*c, 1.0), (q, -1.0)], Sense::Le, 0.0)?;
    }
    for c in vbar.iter().flatten() {
        art.model.add_constraint(vec![(*c, 1.0), (qbar, -1.0)], Sense::Le, 0.0)?;
    }
    // u + ubar = x, v + vbar = y
    for l in 0..p {
        art.model.add_constraint(vec![(u[l], 1.0), (ubar[l], 1.0), (xc[l], -1.0)], Sense::Eq, 0.0)?;
    }
    for j in 0..n {
        let mut terms: Vec<(usize, f64)> = [v[j], vbar[j]].iter().flatten().map(|&c| (c, 1.0)).collect();
        terms.push((yc[j], -1.0));
        art.model.add_constraint(terms, Sense::Eq, 0.0)?;
    }
    art.model.add_constraint(vec![(q, 1.0), (qbar, 1.0)], Sense::Eq, 1.0)?;
    Ok(())
}

fn build_blocks(inst: &LpccInstance, kind: RelaxationKind, blocks: Vec<Block>) -> Result<RelaxationArtifact> {
    let mut art = RelaxationArtifact::new(kind, inst.direction, inst.num_x, inst.num_y);
    let (xc, yc) = add_base(&mut art, inst)?;
    for block in &blocks {
        add_block(&mut art, inst, block, &xc, &yc)?;
    }
    art.blocks = blocks;
    let (p, n, k) = (inst.num_x, inst.num_y, art.blocks.len());
    let expected = p + n + 2 * k + 2 * k * p + 2 * k * n;
    if art.ambient_dimension() != expected {
        return Err(Error::Invariant(format!(
            "extended relaxation has dimension {} instead of {expected}",
            art.ambient_dimension()
        )));
    }
    if art.key_map.len() != art.model.num_cols() {
        return Err(Error::Invariant("key map is not a bijection onto the columns".into()));
    }
    Ok(art)
}

/// The LP relaxation: instance rows and bounds, no complementarity.
pub fn build_lp_relaxation(inst: &LpccInstance) -> Result<RelaxationArtifact> {
    if let Some(p) = inst.validate().first() {
        return Err(Error::InvalidModel(format!("invalid instance: {p}")));
    }
    let mut art = RelaxationArtifact::new(RelaxationKind::Lp, inst.direction, inst.num_x, inst.num_y);
    add_base(&mut art, inst)?;
    Ok(art)
}

/// The vertex-cover based extended relaxation for `partition`.
///
/// The instance rows on `(x, y)` are kept as well; they are implied by the
/// blocks but make the model meaningful when the partition is empty.
pub fn build_cover_relaxation(inst: &LpccInstance, partition: &CoverPartition) -> Result<RelaxationArtifact> {
    require_normalized(inst)?;
    partition.check(&inst.conflict_graph()?)?;
    let blocks = (0..partition.len())
        .map(|t| Block {
            group: Group::Cover(t),
            members: partition.group(t).to_vec(),
            neighborhood: partition.neighborhood(t).to_vec(),
        })
        .collect();
    let mut art = build_blocks(inst, RelaxationKind::Cover, blocks)?;
    art.partition = Some(partition.clone());
    Ok(art)
}

/// The edge-by-edge extended relaxation. Edge `e = {i, j}` with `i < j`
/// (edges in lexicographic order) fixes `vbar[e, i] = 0` and `v[e, j] = 0`.
pub fn build_edge_relaxation(inst: &LpccInstance) -> Result<RelaxationArtifact> {
    require_normalized(inst)?;
    let g = inst.conflict_graph()?;
    let blocks = g
        .edges()
        .into_iter()
        .enumerate()
        .map(|(e, (i, j))| Block { group: Group::Edge(e), members: vec![i], neighborhood: vec![j] })
        .collect();
    build_blocks(inst, RelaxationKind::Edge, blocks)
}

/// The partition used by default: neighborhood classes of the matching cover.
pub fn default_partition(inst: &LpccInstance) -> Result<CoverPartition> {
    let g = inst.conflict_graph()?;
    feasible_cover_partition(&g, &approx_min_vertex_cover(&g))
}

pub fn build_default_cover_relaxation(inst: &LpccInstance) -> Result<RelaxationArtifact> {
    build_cover_relaxation(inst, &default_partition(inst)?)
}

/// Cover relaxation over singletons of every non-isolated node.
pub fn build_singleton_cover_relaxation(inst: &LpccInstance) -> Result<RelaxationArtifact> {
    let g = inst.conflict_graph()?;
    build_cover_relaxation(inst, &CoverPartition::singletons(&g))
}

/// Values of the LP, edge and singleton-cover relaxations and of the exact
/// optimum, with any broken link of the expected chain.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub lp: f64,
    pub edge: f64,
    pub cover_singletons: f64,
    pub exact: Option<f64>,
    pub exact_status: ExactStatus,
    pub violations: Vec<String>,
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn optimal_value(art: &RelaxationArtifact, what: &str) -> Result<f64> {
    let res = lp::solve(&art.model)?;
    res.value
        .ok_or_else(|| Error::Invariant(format!("{what} relaxation is {:?}", res.status)))
}

/// Checks `LP >= edge >= singleton cover >= v*` (maximization; reversed for
/// minimization) within `1e-6`.
pub fn objective_bound_ordering_check(inst: &LpccInstance, time_limit: Duration) -> Result<OrderingReport> {
    let lp = optimal_value(&build_lp_relaxation(inst)?, "LP")?;
    let edge = optimal_value(&build_edge_relaxation(inst)?, "edge")?;
    let cover_singletons = optimal_value(&build_singleton_cover_relaxation(inst)?, "cover")?;
    let ex = exact::solve_exact(inst, &ExactOptions { time_limit, ..ExactOptions::default() })?;
    let dir = inst.direction;
    let mut violations = Vec::new();
    let mut link = |name: &str, weak: f64, strong: f64| {
        if !dir.at_least_as_good(weak, strong, 1e-6 * strong.abs().max(1.0)) {
            violations.push(format!("{name}: {weak} does not bound {strong}"));
        }
    };
    link("LP vs edge", lp, edge);
    link("edge vs cover", edge, cover_singletons);
    if let (Some(v), ExactStatus::Proved) = (ex.value, ex.status) {
        link("cover vs exact", cover_singletons, v);
    }
    Ok(OrderingReport { lp, edge, cover_singletons, exact: ex.value, exact_status: ex.status, violations })
}
