//! Exact LPCC optimum by branch-and-bound over complementarity disjunctions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{maximal_cliques_limited, ConflictGraph};
use crate::instance::LpccInstance;
use crate::linear::{LinearModel, Sense, Solution, SolveStatus};
use crate::lp::{self, write_lp, Basis};
use crate::relax::build_lp_relaxation;
use crate::tol;
use crate::varkey::VarKey;

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactStatus {
    #[serde(rename = "PROVED")]
    Proved,
    #[serde(rename = "TIMEOUT")]
    Timeout,
}

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub time_limit: Duration,
    /// Keep every complementarity-feasible node solution, not only improving ones.
    pub collect_leaves: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { time_limit: DEFAULT_TIME_LIMIT, collect_leaves: false }
    }
}

/// A complementarity-feasible point found in the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    /// `None` when the LPCC is infeasible (or no incumbent before a timeout).
    pub value: Option<f64>,
    pub incumbent: Option<Solution>,
    pub point: Option<FeasiblePoint>,
    pub status: ExactStatus,
    pub nodes: usize,
    pub leaves: Vec<FeasiblePoint>,
}

struct Node {
    /// Bound in "larger is better" form.
    key: f64,
    seq: u64,
    zeros: Vec<usize>,
    y: Vec<f64>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// The violated edge with the largest product `y_i * y_j`, first in
/// lexicographic order among ties.
fn branching_edge(edges: &[(usize, usize)], y: &[f64]) -> Option<(usize, usize)> {
    let mut best = None;
    let mut best_prod = tol::COMPLEMENTARITY;
    for &(i, j) in edges {
        let prod = y[i] * y[j];
        if prod > best_prod {
            best_prod = prod;
            best = Some((i, j));
        }
    }
    best
}

struct Tree<'a> {
    inst: &'a LpccInstance,
    base: LinearModel,
    ycols: Vec<usize>,
    xcols: Vec<usize>,
}

enum NodeLp {
    Infeasible,
    Solved { value: f64, x: Vec<f64>, y: Vec<f64>, basis: Option<Basis> },
}

impl Tree<'_> {
    fn solve(&self, zeros: &[usize], start: Option<&Basis>) -> Result<NodeLp> {
        let mut model = self.base.clone();
        for &i in zeros {
            model.set_bounds(self.ycols[i], 0.0, 0.0)?;
        }
        let res = lp::solve_from(&model, start)?;
        match res.status {
            SolveStatus::Infeasible => Ok(NodeLp::Infeasible),
            SolveStatus::Unbounded => Err(Error::UnboundedRelaxation),
            SolveStatus::Optimal => {
                let x = self.xcols.iter().map(|&c| res.x[c]).collect();
                let y = self.ycols.iter().map(|&c| res.x[c]).collect();
                Ok(NodeLp::Solved { value: res.value.expect("optimal"), x, y, basis: res.basis })
            }
        }
    }
}

/// Best-first branch-and-bound. Each node fixes a set of y variables to zero;
/// a node whose LP optimum violates some complementarity pair branches on the
/// pair with the largest product, fixing either endpoint to zero.
pub fn solve_exact(inst: &LpccInstance, opts: &ExactOptions) -> Result<ExactResult> {
    let start = Instant::now();
    let art = build_lp_relaxation(inst)?;
    let xcols = (0..inst.num_x).map(|l| art.key_map[&VarKey::X(l)]).collect();
    let ycols = (0..inst.num_y).map(|j| art.key_map[&VarKey::Y(j)]).collect();
    let tree = Tree { inst, base: art.model, xcols, ycols };
    let edges = inst.conflict_graph()?.edges();
    let dir = inst.direction;

    let mut best: Option<FeasiblePoint> = None;
    let mut leaves = Vec::new();
    let mut nodes = 1;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;

    let accept = |p: FeasiblePoint, best: &mut Option<FeasiblePoint>, leaves: &mut Vec<FeasiblePoint>| {
        let improves = best.as_ref().map_or(true, |b| dir.score(p.value) > dir.score(b.value));
        if opts.collect_leaves {
            leaves.push(p.clone());
        }
        if improves {
            *best = Some(p);
        }
    };

    match tree.solve(&[], None)? {
        NodeLp::Infeasible => {}
        NodeLp::Solved { value, x, y, basis } => {
            if branching_edge(&edges, &y).is_none() {
                accept(FeasiblePoint { x, y, value }, &mut best, &mut leaves);
            } else {
                heap.push(Node { key: dir.score(value), seq, zeros: Vec::new(), y, basis });
                seq += 1;
            }
        }
    }

    let mut status = ExactStatus::Proved;
    let mut last_key = f64::INFINITY;
    while let Some(node) = heap.pop() {
        if node.key > last_key + 1e-9 * last_key.abs().max(1.0) {
            return Err(Error::Invariant(format!(
                "best-first bound increased from {last_key} to {}",
                node.key
            )));
        }
        last_key = node.key;
        if let Some(b) = &best {
            let inc = dir.score(b.value);
            if node.key <= inc + 1e-9 * inc.abs().max(1.0) {
                break;
            }
        }
        if start.elapsed() > opts.time_limit {
            status = ExactStatus::Timeout;
            break;
        }
        let (i, j) = branching_edge(&edges, &node.y).expect("queued nodes violate a pair");
        for fixed in [i, j] {
            let mut zeros = node.zeros.clone();
            if let Err(pos) = zeros.binary_search(&fixed) {
                zeros.insert(pos, fixed);
            }
            nodes += 1;
            match tree.solve(&zeros, node.basis.as_ref())? {
                NodeLp::Infeasible => {}
                NodeLp::Solved { value, x, y, basis } => {
                    if branching_edge(&edges, &y).is_none() {
                        accept(FeasiblePoint { x, y, value }, &mut best, &mut leaves);
                    } else {
                        let key = dir.score(value).min(node.key);
                        heap.push(Node { key, seq, zeros, y, basis });
                        seq += 1;
                    }
                }
            }
        }
    }
    log::debug!("branch-and-bound explored {nodes} nodes");

    let incumbent = best.as_ref().map(|p| {
        let mut assignment = std::collections::BTreeMap::new();
        for (l, &v) in p.x.iter().enumerate() {
            assignment.insert(VarKey::X(l).to_string(), v);
        }
        for (j, &v) in p.y.iter().enumerate() {
            assignment.insert(VarKey::Y(j).to_string(), v);
        }
        Solution { status: SolveStatus::Optimal, value: Some(p.value), assignment }
    });
    if let Some(p) = &best {
        let report = tree.inst.evaluate(&p.x, &p.y)?;
        if !report.is_feasible() {
            return Err(Error::Invariant(format!("incumbent is not feasible: {report:?}")));
        }
    }
    Ok(ExactResult { value: best.as_ref().map(|p| p.value), incumbent, point: best, status, nodes, leaves })
}

/// Time limit from `LPCC_TIME_LIMIT` (seconds), falling back to the default.
pub fn time_limit_from_env() -> Duration {
    std::env::var("LPCC_TIME_LIMIT")
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|s| *s > 0.0)
        .map(Duration::from_secs_f64)
        .unwrap_or(DEFAULT_TIME_LIMIT)
}

/// Optimum by enumerating maximal stable sets: every feasible point has its
/// y-support inside one of them. Returns `None` for an infeasible LPCC.
pub fn brute_force_oracle(inst: &LpccInstance) -> Result<Option<f64>> {
    let art = build_lp_relaxation(inst)?;
    let g: ConflictGraph = inst.conflict_graph()?;
    let stable = maximal_cliques_limited(&g.complement(), usize::MAX).cliques;
    let mut best: Option<f64> = None;
    for s in stable {
        let mut model = art.model.clone();
        for j in 0..inst.num_y {
            if s.binary_search(&j).is_err() {
                model.set_bounds(art.key_map[&VarKey::Y(j)], 0.0, 0.0)?;
            }
        }
        let res = lp::solve(&model)?;
        match res.status {
            SolveStatus::Unbounded => return Err(Error::UnboundedRelaxation),
            SolveStatus::Infeasible => {}
            SolveStatus::Optimal => {
                let v = res.value.expect("optimal");
                if best.map_or(true, |b| inst.direction.score(v) > inst.direction.score(b)) {
                    best = Some(v);
                }
            }
        }
    }
    Ok(best)
}

/// The LP relaxation plus a binary `z_i` for every node with an edge,
/// `z_i + z_j <= 1` per edge and `y_i <= z_i`. Returns the model and the
/// binary columns.
pub fn bigm_model(inst: &LpccInstance) -> Result<(LinearModel, Vec<usize>)> {
    if !inst.is_normalized() {
        return Err(Error::InvalidModel("big-M model needs unit y bounds; call normalize() first".into()));
    }
    let art = build_lp_relaxation(inst)?;
    let mut model = art.model;
    let g = inst.conflict_graph()?;
    let mut z = vec![None; inst.num_y];
    let mut binaries = Vec::new();
    for i in g.non_isolated() {
        let c = model.add_variable(VarKey::Z(i).to_string(), 0.0, 1.0)?;
        z[i] = Some(c);
        binaries.push(c);
    }
    for (i, j) in g.edges() {
        model.add_constraint(vec![(z[i].unwrap(), 1.0), (z[j].unwrap(), 1.0)], Sense::Le, 1.0)?;
    }
    for i in g.non_isolated() {
        model.add_constraint(vec![(art.key_map[&VarKey::Y(i)], 1.0), (z[i].unwrap(), -1.0)], Sense::Le, 0.0)?;
    }
    Ok((model, binaries))
}

pub fn export_bigm_mip(inst: &LpccInstance, path: impl AsRef<Path>) -> Result<()> {
    let (model, binaries) = bigm_model(inst)?;
    let mut w = BufWriter::new(File::create(path)?);
    write_lp(&model, &binaries, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::Direction;

    fn bounds_only(n: usize, edges: &[(usize, usize)]) -> LpccInstance {
        let mut inst = LpccInstance::new(Direction::Max, 0, n);
        inst.objective_y = vec![1.0; n];
        inst.edges = edges.to_vec();
        inst
    }

    #[test]
    fn single_edge_needs_one_branching() {
        let inst = bounds_only(2, &[(0, 1)]);
        let r = solve_exact(&inst, &ExactOptions::default()).unwrap();
        assert_eq!(r.status, ExactStatus::Proved);
        assert!((r.value.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(r.nodes, 3);
        assert_eq!(brute_force_oracle(&inst).unwrap(), Some(1.0));
    }

    #[test]
    fn triangle_and_five_cycle() {
        let tri = bounds_only(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!((solve_exact(&tri, &ExactOptions::default()).unwrap().value.unwrap() - 1.0).abs() < 1e-9);
        let c5 = bounds_only(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert!((solve_exact(&c5, &ExactOptions::default()).unwrap().value.unwrap() - 2.0).abs() < 1e-9);
        assert!((brute_force_oracle(&c5).unwrap().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn edgeless_oracle_is_the_lp() {
        let inst = bounds_only(3, &[]);
        assert!((brute_force_oracle(&inst).unwrap().unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn bigm_sizes() {
        let inst = bounds_only(3, &[(0, 1)]);
        let (m, bin) = bigm_model(&inst).unwrap();
        assert_eq!(bin.len(), 2);
        assert_eq!(m.num_rows(), 3);
        let (m, bin) = bigm_model(&bounds_only(3, &[])).unwrap();
        assert!(bin.is_empty());
        assert_eq!(m.num_rows(), 0);
    }
}
