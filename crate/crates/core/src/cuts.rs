//! Cutting planes for the cover relaxation.
//!
//! Three sources of valid inequalities:
//!
//! * stable-set inequalities `alpha·y <= beta` from cliques, odd holes and odd
//!   antiholes, together with their lifts `alpha·v_T <= beta q_T` and
//!   `alpha·vbar_T <= beta qbar_T` for every group `T`;
//! * clique inequalities on the group indicators: when groups `T_1..T_k`
//!   meet a common clique, `sum q_{T_i} <= 1` and `sum v_{T_i} <= y`;
//! * eight odd-cycle inequalities of the boolean quadric polytope over pairs
//!   of groups and pairs of y indices, separated in rounds.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{maximal_cliques_limited, odd_antiholes, odd_holes, ConflictGraph, CoverPartition};
use crate::graph::{DEFAULT_CLIQUE_LIMIT, DEFAULT_MAX_HOLE_LEN};
use crate::linear::Sense;
use crate::lp::{self, LpResult};
use crate::relax::{RelaxationArtifact, RelaxationKind};
use crate::tol;
use crate::varkey::{Group, VarKey};

/// Most violated BQP cuts kept per separation round.
pub const BQP_ROUND_CAP: usize = 500;
/// Maximum number of LP solves in the BQP loop.
pub const BQP_MAX_ROUNDS: usize = 5;
/// The loop stops once a round changes the value by less than this fraction.
pub const BQP_RELATIVE_STOP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CutFamily {
    CliqueY,
    OddcycleY,
    AntiholeY,
    LiftedStable,
    CliqueQ,
    CliqueV,
    BqpOddcycle,
}

/// A row `sum(coef * key) <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub terms: Vec<(VarKey, f64)>,
    pub rhs: f64,
    pub family: CutFamily,
    pub provenance: String,
}

impl Cut {
    /// Left-hand side with `value` supplying each key's value.
    pub fn lhs(&self, mut value: impl FnMut(&VarKey) -> f64) -> f64 {
        self.terms.iter().map(|(k, a)| a * value(k)).sum()
    }

    pub fn violation(&self, value: impl FnMut(&VarKey) -> f64) -> f64 {
        self.lhs(value) - self.rhs
    }
}

#[derive(Debug, Clone)]
pub struct CutOptions {
    pub max_hole_len: usize,
    pub clique_limit: usize,
    pub holes: bool,
    pub antiholes: bool,
}

impl Default for CutOptions {
    fn default() -> Self {
        CutOptions { max_hole_len: DEFAULT_MAX_HOLE_LEN, clique_limit: DEFAULT_CLIQUE_LIMIT, holes: true, antiholes: true }
    }
}

fn v_eliminated(partition: &CoverPartition, t: usize, j: usize) -> bool {
    partition.neighborhood(t).binary_search(&j).is_ok()
}

fn vbar_eliminated(partition: &CoverPartition, t: usize, j: usize) -> bool {
    partition.group(t).binary_search(&j).is_ok()
}

fn set_label(nodes: &[usize]) -> String {
    let items: Vec<String> = nodes.iter().map(|i| (i + 1).to_string()).collect();
    items.join(",")
}

/// Clique, odd-hole and odd-antihole inequalities in `y`, plus both lifts of
/// each one for every group.
pub fn stable_set_cuts(g: &ConflictGraph, partition: &CoverPartition, opts: &CutOptions) -> Vec<Cut> {
    let mut structures: Vec<(Vec<usize>, f64, CutFamily, String)> = Vec::new();
    for c in maximal_cliques_limited(g, opts.clique_limit).cliques {
        if c.len() >= 2 {
            let label = format!("clique {{{}}}", set_label(&c));
            structures.push((c, 1.0, CutFamily::CliqueY, label));
        }
    }
    if opts.holes {
        for d in odd_holes(g, opts.max_hole_len) {
            let beta = ((d.len() - 1) / 2) as f64;
            let label = format!("hole ({})", set_label(&d));
            let mut nodes = d;
            nodes.sort_unstable();
            structures.push((nodes, beta, CutFamily::OddcycleY, label));
        }
    }
    if opts.antiholes {
        for d in odd_antiholes(g, opts.max_hole_len) {
            let label = format!("antihole {{{}}}", set_label(&d));
            structures.push((d, 2.0, CutFamily::AntiholeY, label));
        }
    }
    let mut cuts = Vec::new();
    for (nodes, beta, family, label) in structures {
        cuts.push(Cut {
            terms: nodes.iter().map(|&i| (VarKey::Y(i), 1.0)).collect(),
            rhs: beta,
            family,
            provenance: label.clone(),
        });
        for t in 0..partition.len() {
            let grp = Group::Cover(t);
            let v: Vec<(VarKey, f64)> = nodes
                .iter()
                .filter(|&&i| !v_eliminated(partition, t, i))
                .map(|&i| (VarKey::V(grp, i), 1.0))
                .collect();
            if !v.is_empty() {
                let mut terms = v;
                terms.push((VarKey::Q(grp), -beta));
                cuts.push(Cut { terms, rhs: 0.0, family: CutFamily::LiftedStable, provenance: format!("{label} on v[{grp}]") });
            }
            let vbar: Vec<(VarKey, f64)> = nodes
                .iter()
                .filter(|&&i| !vbar_eliminated(partition, t, i))
                .map(|&i| (VarKey::VBar(grp, i), 1.0))
                .collect();
            if !vbar.is_empty() {
                let mut terms = vbar;
                terms.push((VarKey::QBar(grp), -beta));
                cuts.push(Cut {
                    terms,
                    rhs: 0.0,
                    family: CutFamily::LiftedStable,
                    provenance: format!("{label} on vbar[{grp}]"),
                });
            }
        }
    }
    cuts
}

/// For every maximal clique met by at least two groups: `sum q <= 1` over
/// those groups and `sum_T v[T, j] - y_j <= 0` for every `j`.
pub fn clique_q_cuts(g: &ConflictGraph, partition: &CoverPartition, opts: &CutOptions) -> Vec<Cut> {
    let n = g.num_nodes();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut cuts = Vec::new();
    for c in maximal_cliques_limited(g, opts.clique_limit).cliques {
        if c.len() < 2 {
            continue;
        }
        let mut groups: Vec<usize> = c.iter().filter_map(|&i| partition.group_of(i)).collect();
        groups.sort_unstable();
        groups.dedup();
        if groups.len() < 2 || !seen.insert(groups.clone()) {
            continue;
        }
        let glabel: Vec<String> = groups.iter().map(|t| format!("T{}", t + 1)).collect();
        let label = format!("clique {{{}}} meets {}", set_label(&c), glabel.join(","));
        cuts.push(Cut {
            terms: groups.iter().map(|&t| (VarKey::Q(Group::Cover(t)), 1.0)).collect(),
            rhs: 1.0,
            family: CutFamily::CliqueQ,
            provenance: label.clone(),
        });
        for j in 0..n {
            let mut terms: Vec<(VarKey, f64)> = groups
                .iter()
                .filter(|&&t| !v_eliminated(partition, t, j))
                .map(|&t| (VarKey::V(Group::Cover(t), j), 1.0))
                .collect();
            terms.push((VarKey::Y(j), -1.0));
            cuts.push(Cut { terms, rhs: 0.0, family: CutFamily::CliqueV, provenance: format!("{label}, y{}", j + 1) });
        }
    }
    cuts
}

/// Both static families.
pub fn static_cuts(g: &ConflictGraph, partition: &CoverPartition, opts: &CutOptions) -> Vec<Cut> {
    let mut cuts = stable_set_cuts(g, partition, opts);
    cuts.extend(clique_q_cuts(g, partition, opts));
    cuts
}

/// Values of `y`, `q`, `qbar`, `v`, `vbar` at a point of the cover relaxation,
/// with eliminated components set to zero.
#[derive(Debug, Clone)]
pub struct BqpPoint {
    pub y: Vec<f64>,
    pub q: Vec<f64>,
    pub qbar: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub vbar: Vec<Vec<f64>>,
}

impl BqpPoint {
    pub fn from_fn(groups: usize, n: usize, value: impl Fn(&VarKey) -> f64) -> Self {
        let g = |t| Group::Cover(t);
        BqpPoint {
            y: (0..n).map(|j| value(&VarKey::Y(j))).collect(),
            q: (0..groups).map(|t| value(&VarKey::Q(g(t)))).collect(),
            qbar: (0..groups).map(|t| value(&VarKey::QBar(g(t)))).collect(),
            v: (0..groups).map(|t| (0..n).map(|j| value(&VarKey::V(g(t), j))).collect()).collect(),
            vbar: (0..groups).map(|t| (0..n).map(|j| value(&VarKey::VBar(g(t), j))).collect()).collect(),
        }
    }

    /// Reads the point from a column vector of a cover artifact.
    pub fn from_artifact(art: &RelaxationArtifact, cols: &[f64]) -> Self {
        let groups = art.partition.as_ref().map_or(0, |p| p.len());
        Self::from_fn(groups, art.num_y, |k| art.value(cols, k).unwrap_or(0.0))
    }
}

/// Outcome of one BQP separation scan.
#[derive(Debug, Clone)]
pub struct BqpScan {
    /// Violated cuts, most violated first.
    pub cuts: Vec<Cut>,
    /// Number of template evaluations performed.
    pub evaluations: u64,
}

const TEMPLATES: usize = 8;

/// Left-hand side and right-hand side of template `k` for groups `(a, b)` and
/// indices `(i, j)`. Terms are `(kind, group, index, coef)` with kind 0 = q,
/// 1 = qbar, 2 = y, 3 = v, 4 = vbar.
fn template(k: usize, a: usize, b: usize, i: usize, j: usize) -> ([(u8, usize, usize, f64); 6], f64) {
    const Q: u8 = 0;
    const QB: u8 = 1;
    const Y: u8 = 2;
    const V: u8 = 3;
    const VB: u8 = 4;
    match k {
        0 => ([(Q, b, 0, -1.0), (Y, 0, j, -1.0), (V, a, j, 1.0), (V, b, i, 1.0), (V, b, j, 1.0), (V, a, i, -1.0)], 0.0),
        1 => ([(QB, b, 0, -1.0), (Y, 0, j, -1.0), (VB, a, j, 1.0), (VB, b, i, 1.0), (VB, b, j, 1.0), (VB, a, i, -1.0)], 0.0),
        2 => ([(Q, b, 0, -1.0), (Y, 0, j, -1.0), (VB, a, j, 1.0), (V, b, i, 1.0), (V, b, j, 1.0), (VB, a, i, -1.0)], 0.0),
        3 => ([(QB, b, 0, -1.0), (Y, 0, j, -1.0), (V, a, j, 1.0), (VB, b, i, 1.0), (VB, b, j, 1.0), (V, a, i, -1.0)], 0.0),
        4 => ([(Q, a, 0, 1.0), (Y, 0, j, 1.0), (V, b, i, 1.0), (V, a, i, -1.0), (V, a, j, -1.0), (V, b, j, -1.0)], 1.0),
        5 => ([(QB, a, 0, 1.0), (Y, 0, j, 1.0), (VB, b, i, 1.0), (VB, a, i, -1.0), (VB, a, j, -1.0), (VB, b, j, -1.0)], 1.0),
        6 => ([(Q, a, 0, 1.0), (Y, 0, j, 1.0), (VB, b, i, 1.0), (V, a, i, -1.0), (V, a, j, -1.0), (VB, b, j, -1.0)], 1.0),
        7 => ([(QB, a, 0, 1.0), (Y, 0, j, 1.0), (V, b, i, 1.0), (VB, a, i, -1.0), (VB, a, j, -1.0), (V, b, j, -1.0)], 1.0),
        _ => unreachable!("eight templates"),
    }
}

fn term_value(p: &BqpPoint, kind: u8, t: usize, j: usize) -> f64 {
    match kind {
        0 => p.q[t],
        1 => p.qbar[t],
        2 => p.y[j],
        3 => p.v[t][j],
        _ => p.vbar[t][j],
    }
}

fn term_key(kind: u8, t: usize, j: usize) -> VarKey {
    let g = Group::Cover(t);
    match kind {
        0 => VarKey::Q(g),
        1 => VarKey::QBar(g),
        2 => VarKey::Y(j),
        3 => VarKey::V(g, j),
        _ => VarKey::VBar(g, j),
    }
}

/// Scans all ordered group pairs `a != b`, index pairs `i != j` and the eight
/// templates; returns cuts violated by more than `1e-6`, the `cap` most
/// violated first (ties broken by `(a, b, i, j, template)`).
pub fn bqp_violated_cuts(point: &BqpPoint, partition: &CoverPartition, cap: usize) -> BqpScan {
    let k = partition.len();
    let n = point.y.len();
    let per_group: Vec<(Vec<(f64, [usize; 5])>, u64)> = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut found = Vec::new();
            let mut evaluations = 0u64;
            for b in (0..k).filter(|&b| b != a) {
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        for tpl in 0..TEMPLATES {
                            evaluations += 1;
                            let (terms, rhs) = template(tpl, a, b, i, j);
                            let lhs: f64 = terms
                                .iter()
                                .map(|&(kind, t, jj, c)| c * term_value(point, kind, t, jj))
                                .sum();
                            let viol = lhs - rhs;
                            if viol > tol::CUT_VIOLATION {
                                found.push((viol, [a, b, i, j, tpl]));
                            }
                        }
                    }
                }
            }
            sort_candidates(&mut found);
            found.truncate(cap);
            (found, evaluations)
        })
        .collect();
    let evaluations = per_group.iter().map(|(_, e)| e).sum();
    let mut all: Vec<(f64, [usize; 5])> = per_group.into_iter().flat_map(|(f, _)| f).collect();
    sort_candidates(&mut all);
    all.truncate(cap);
    let cuts = all
        .into_iter()
        .map(|(_, [a, b, i, j, tpl])| {
            let (terms, rhs) = template(tpl, a, b, i, j);
            let terms = terms
                .iter()
                .filter(|&&(kind, t, jj, _)| match kind {
                    3 => !v_eliminated(partition, t, jj),
                    4 => !vbar_eliminated(partition, t, jj),
                    _ => true,
                })
                .map(|&(kind, t, jj, c)| (term_key(kind, t, jj), c))
                .collect();
            Cut {
                terms,
                rhs,
                family: CutFamily::BqpOddcycle,
                provenance: format!("template {} on T{},T{} y{},y{}", tpl + 1, a + 1, b + 1, i + 1, j + 1),
            }
        })
        .collect();
    BqpScan { cuts, evaluations }
}

fn sort_candidates(c: &mut [(f64, [usize; 5])]) {
    c.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
}

fn fingerprint(terms: &[(usize, f64)], rhs: f64) -> Vec<u64> {
    let mut fp = Vec::with_capacity(2 * terms.len() + 1);
    for &(c, a) in terms {
        fp.push(c as u64);
        fp.push((a + 0.0).to_bits());
    }
    fp.push((rhs + 0.0).to_bits());
    fp
}

/// Appends `cuts` to the artifact's model; returns how many rows were added.
///
/// Terms on eliminated keys are dropped. Rows already present (same sorted
/// coefficients and rhs) are skipped, as are rows left without terms whose
/// rhs is nonnegative.
pub fn append_cuts(art: &mut RelaxationArtifact, cuts: &[Cut], lazy: bool) -> Result<usize> {
    let mut added = 0;
    for cut in cuts {
        let mut terms = Vec::with_capacity(cut.terms.len());
        for (key, a) in &cut.terms {
            match art.key_map.get(key) {
                Some(&c) => terms.push((c, *a)),
                None if art.eliminated.contains(key) => {}
                None => return Err(Error::UnknownVariable(key.to_string())),
            }
        }
        terms.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (c, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += a,
                _ => merged.push((c, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        if merged.is_empty() {
            if cut.rhs < 0.0 {
                return Err(Error::Invariant(format!("cut `{}` reduces to 0 <= {}", cut.provenance, cut.rhs)));
            }
            continue;
        }
        if !art.cut_fingerprints.insert(fingerprint(&merged, cut.rhs)) {
            continue;
        }
        if lazy {
            art.model.add_lazy_constraint(merged, Sense::Le, cut.rhs)?;
        } else {
            art.model.add_constraint(merged, Sense::Le, cut.rhs)?;
        }
        *art.cut_counts.entry(cut.family).or_insert(0) += 1;
        added += 1;
    }
    Ok(added)
}

/// A copy of `art` with `cuts` appended as ordinary rows.
pub fn apply_cuts(art: &RelaxationArtifact, cuts: &[Cut]) -> Result<RelaxationArtifact> {
    let mut out = art.clone();
    append_cuts(&mut out, cuts, false)?;
    Ok(out)
}

/// A copy of `art` with `cuts` appended as lazy rows: the solver switches a
/// row on only when the current optimum violates it.
pub fn apply_cuts_lazy(art: &RelaxationArtifact, cuts: &[Cut]) -> Result<RelaxationArtifact> {
    let mut out = art.clone();
    append_cuts(&mut out, cuts, true)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    NoViolatedCuts,
    SmallImprovement,
    RoundLimit,
    NotOptimal,
}

#[derive(Debug, Clone)]
pub struct BqpOutcome {
    pub result: LpResult,
    /// Number of LP solves.
    pub rounds: usize,
    /// Objective after every solve.
    pub values: Vec<f64>,
    pub cuts_added: usize,
    pub stop: StopReason,
    pub evaluations: u64,
    pub artifact: RelaxationArtifact,
}

/// Solve, separate BQP cuts at the optimum, add them and solve again, until
/// no cut is violated, a round moves the value by less than 1%, or five
/// solves have been made. Errors if the value ever moves the wrong way.
pub fn iterate_bqp_separation(artifact: &RelaxationArtifact) -> Result<BqpOutcome> {
    let partition = match (&artifact.kind, &artifact.partition) {
        (RelaxationKind::Cover, Some(p)) => p.clone(),
        _ => return Err(Error::InvalidModel("BQP separation needs a cover relaxation".into())),
    };
    let dir = artifact.model.direction();
    let mut art = artifact.clone();
    let mut result = lp::solve(&art.model)?;
    art.model.promote_lazy(&result.activated);
    let mut rounds = 1;
    let mut values = Vec::new();
    let mut cuts_added = 0;
    let mut evaluations = 0;
    let stop = loop {
        let Some(current) = result.value else { break StopReason::NotOptimal };
        values.push(current);
        if let [.., prev, last] = values[..] {
            if dir.score(last) > dir.score(prev) + 1e-7 * prev.abs().max(1.0) {
                return Err(Error::Invariant(format!("BQP round moved the bound from {prev} to {last}")));
            }
            if (prev - last).abs() < BQP_RELATIVE_STOP * last.abs() {
                break StopReason::SmallImprovement;
            }
        }
        let scan = bqp_violated_cuts(&BqpPoint::from_artifact(&art, &result.x), &partition, BQP_ROUND_CAP);
        evaluations += scan.evaluations;
        if scan.cuts.is_empty() {
            break StopReason::NoViolatedCuts;
        }
        if rounds == BQP_MAX_ROUNDS {
            break StopReason::RoundLimit;
        }
        let added = append_cuts(&mut art, &scan.cuts, false)?;
        if added == 0 {
            break StopReason::NoViolatedCuts;
        }
        cuts_added += added;
        result = lp::solve(&art.model)?;
        art.model.promote_lazy(&result.activated);
        rounds += 1;
    };
    Ok(BqpOutcome { result, rounds, values, cuts_added, stop, evaluations, artifact: art })
}

pub fn write_cut_pool<W: Write>(cuts: &[Cut], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, cuts)?;
    Ok(())
}

pub fn read_cut_pool<R: Read>(r: R) -> Result<Vec<Cut>> {
    Ok(serde_json::from_reader(r)?)
}
