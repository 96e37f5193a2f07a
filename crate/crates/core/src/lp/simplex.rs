//! Bounded-variable primal simplex on a factored basis.
//!
//! Every row `a·x <sense> b` receives a slack `s` with `a·x + s = b` and
//! bounds `[0, inf)` for `<=`, `(-inf, 0]` for `>=` and `[0, 0]` for `=`.
//! The slacks form the starting basis. Phase 1 minimizes the sum of bound
//! infeasibilities of the basic variables, phase 2 the cost. Pricing scales
//! reduced costs by Devex reference weights (Dantzig's rule until the first
//! pivot) and falls back to Bland's rule when stalling.

use crate::error::{Error, Result};
use crate::linear::Sense;
use crate::lp::lu::BasisFactor;
use crate::tol;

/// Consecutive degenerate pivots tolerated before switching to Bland pricing.
pub const BLAND_AFTER: usize = 5_000;
/// Reduced costs below this are treated as zero.
const DJ_TOL: f64 = 1e-9;
/// Basic values this far outside their bounds count as infeasible in phase 1.
const PHASE1_TOL: f64 = 1e-8;
/// Bound relaxation of the Harris ratio test.
const HARRIS: f64 = 1e-9;
/// Entries of the entering column at or below this never serve as pivots.
const RATIO_PIVOT: f64 = 1e-7;
/// Basis updates between refactorizations.
const REFACTOR_EVERY: usize = 64;
/// Devex weights are reset once one grows beyond this.
const DEVEX_RESET: f64 = 1e8;
/// Relative size of the bound perturbation used before the final cleanup.
const PERTURB: f64 = 1e-6;
/// Number of times a finished solve may be refactored and resumed.
const MAX_REINVERT: usize = 3;

/// The row data a solve runs on: structural bounds, sparse rows and costs.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Objective in minimization form.
    pub cost: Vec<f64>,
}

impl StandardForm {
    pub fn num_cols(&self) -> usize {
        self.lower.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Where a column sits in a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Column statuses of a basis: structurals first, then one slack per row.
pub type Basis = Vec<BasisStatus>;

#[derive(Debug)]
pub struct SimplexResult {
    pub outcome: Outcome,
    /// Structural values (meaningful when optimal).
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final basis of an optimal solve.
    pub basis: Option<Basis>,
}

struct Step {
    theta: f64,
    /// Leaving basis position and the bound the leaving variable ends at;
    /// `None` is a bound flip.
    leave: Option<(usize, f64)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Simplex<'a> {
    sf: &'a StandardForm,
    m: usize,
    n: usize,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    /// Structural columns by row.
    cols: Vec<Vec<(usize, f64)>>,
    basis: Vec<usize>,
    /// Basis position of a column, `usize::MAX` for nonbasic columns.
    pos: Vec<usize>,
    /// Values of nonbasic columns.
    val: Vec<f64>,
    beta: Vec<f64>,
    factor: BasisFactor,
    d: Vec<f64>,
    /// Devex reference weights.
    weights: Vec<f64>,
    /// Scratch row of `B^-1 A` and its occupancy.
    arow: Vec<f64>,
    mark: Vec<bool>,
    work: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    degenerate: usize,
    bland: bool,
}

/// Solves `sf`, starting from `start` when it names exactly one basic
/// column per row and from the slack basis otherwise.
pub fn solve_from(sf: &StandardForm, start: Option<&Basis>) -> Result<SimplexResult> {
    let mut s = Simplex::new(sf);
    if let Some(b) = start {
        s.warm_start(b);
    }
    s.perturb_bounds();
    let outcome = s.run()?;
    s.restore_bounds();
    if outcome == Outcome::Unbounded {
        return Ok(SimplexResult { outcome, x: Vec::new(), iterations: s.iterations, basis: None });
    }
    let mut reinverts = 0;
    loop {
        let outcome = s.run()?;
        if outcome != Outcome::Optimal {
            return Ok(SimplexResult { outcome, x: Vec::new(), iterations: s.iterations, basis: None });
        }
        s.refactor()?;
        let violation = s.primal_violation();
        if violation <= tol::FEAS && s.certify_reduced_costs() {
            let x = s.structural_values();
            let basis = Some(s.statuses());
            return Ok(SimplexResult { outcome, x, iterations: s.iterations, basis });
        }
        if reinverts == MAX_REINVERT {
            return Err(Error::NumericalBreakdown(format!(
                "primal violation {violation:.3e} persists after {MAX_REINVERT} refactorizations"
            )));
        }
        reinverts += 1;
        log::debug!("resuming after refactorization (violation {violation:.3e})");
        s.restore_bounds();
    }
}

impl<'a> Simplex<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let m = sf.num_rows();
        let n = sf.num_cols();
        let nc = n + m;
        let mut lo = sf.lower.clone();
        let mut up = sf.upper.clone();
        for &sense in &sf.senses {
            let (l, u) = slack_bounds(sense);
            lo.push(l);
            up.push(u);
        }
        let mut cost = sf.cost.clone();
        cost.resize(nc, 0.0);
        let mut cols = vec![Vec::new(); n];
        for (i, row) in sf.rows.iter().enumerate() {
            for &(j, a) in row {
                cols[j].push((i, a));
            }
        }
        let val: Vec<f64> = (0..nc).map(|j| initial_value(lo[j], up[j])).collect();
        let basis: Vec<usize> = (0..m).map(|i| n + i).collect();
        let mut pos = vec![usize::MAX; nc];
        for (i, &b) in basis.iter().enumerate() {
            pos[b] = i;
        }
        let identity: Vec<Vec<(usize, f64)>> = (0..m).map(|i| vec![(i, 1.0)]).collect();
        let factor = BasisFactor::new(m, &identity, tol::BREAKDOWN).expect("identity is nonsingular");
        let mut s = Simplex {
            sf,
            m,
            n,
            lo,
            up,
            cost,
            cols,
            basis,
            pos,
            val,
            beta: vec![0.0; m],
            factor,
            d: vec![0.0; nc],
            weights: vec![1.0; nc],
            arow: vec![0.0; nc],
            mark: vec![false; nc],
            work: vec![0.0; m],
            iterations: 0,
            max_iterations: 50_000usize.max(20 * (m + nc)),
            degenerate: 0,
            bland: false,
        };
        s.recompute_beta();
        s
    }

    /// Widens every finite bound by a small deterministic amount so that
    /// degenerate vertices split apart.
    fn perturb_bounds(&mut self) {
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + 0.5 * (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for j in 0..self.n + self.m {
            let at_upper = self.pos[j] == usize::MAX && self.up[j].is_finite() && self.val[j] == self.up[j];
            if self.lo[j].is_finite() {
                self.lo[j] -= PERTURB * (1.0 + self.lo[j].abs()) * next();
            }
            if self.up[j].is_finite() {
                self.up[j] += PERTURB * (1.0 + self.up[j].abs()) * next();
            }
            if self.pos[j] == usize::MAX {
                self.val[j] = if at_upper { self.up[j] } else { initial_value(self.lo[j], self.up[j]) };
            }
        }
        self.recompute_beta();
    }

    /// Puts the original bounds back, moving nonbasic columns onto them.
    fn restore_bounds(&mut self) {
        for j in 0..self.n + self.m {
            let (lo, up) = self.original_bounds(j);
            if self.pos[j] == usize::MAX {
                let v = self.val[j];
                self.val[j] = if v <= self.lo[j] {
                    initial_value(lo, up)
                } else if v >= self.up[j] {
                    if up.is_finite() { up } else { initial_value(lo, up) }
                } else {
                    v.clamp(lo, up)
                };
            }
            self.lo[j] = lo;
            self.up[j] = up;
        }
        self.degenerate = 0;
        self.bland = false;
        self.recompute_beta();
    }

    fn warm_start(&mut self, start: &Basis) {
        let nc = self.n + self.m;
        if start.len() != nc || start.iter().filter(|&&st| st == BasisStatus::Basic).count() != self.m {
            return;
        }
        let (old_basis, old_pos, old_val) = (self.basis.clone(), self.pos.clone(), self.val.clone());
        self.basis = (0..nc).filter(|&j| start[j] == BasisStatus::Basic).collect();
        self.pos = vec![usize::MAX; nc];
        for (i, &b) in self.basis.iter().enumerate() {
            self.pos[b] = i;
        }
        for j in 0..nc {
            if start[j] == BasisStatus::AtUpper && self.up[j].is_finite() {
                self.val[j] = self.up[j];
            }
        }
        if self.refactor().is_err() {
            log::debug!("starting basis is singular, using the slack basis");
            self.basis = old_basis;
            self.pos = old_pos;
            self.val = old_val;
            self.refactor().expect("slack basis is nonsingular");
        }
    }

    fn statuses(&self) -> Basis {
        (0..self.n + self.m)
            .map(|j| {
                if self.pos[j] != usize::MAX {
                    BasisStatus::Basic
                } else if self.up[j].is_finite() && self.val[j] == self.up[j] && self.val[j] != self.lo[j] {
                    BasisStatus::AtUpper
                } else {
                    BasisStatus::AtLower
                }
            })
            .collect()
    }

    fn original_bounds(&self, j: usize) -> (f64, f64) {
        if j < self.n {
            return (self.sf.lower[j], self.sf.upper[j]);
        }
        slack_bounds(self.sf.senses[j - self.n])
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, 1.0)]
        }
    }

    /// Factors the current basis from scratch. Columns that make it singular
    /// are swapped for slacks of the rows left without a pivot.
    fn refactor(&mut self) -> Result<()> {
        for attempt in 0..2 {
            let columns: Vec<Vec<(usize, f64)>> = self.basis.iter().map(|&j| self.column(j)).collect();
            match BasisFactor::new(self.m, &columns, tol::BREAKDOWN) {
                Ok(f) => {
                    self.factor = f;
                    self.recompute_beta();
                    return Ok(());
                }
                Err(singular) if attempt == 0 => {
                    log::debug!("repairing singular basis ({} columns)", singular.positions.len());
                    for (&p, &row) in singular.positions.iter().zip(&singular.rows) {
                        let out = self.basis[p];
                        let slack = self.n + row;
                        self.val[out] = self.beta[p].clamp(self.lo[out], self.up[out]);
                        self.pos[out] = usize::MAX;
                        self.basis[p] = slack;
                        self.pos[slack] = p;
                    }
                }
                Err(_) => break,
            }
        }
        Err(Error::NumericalBreakdown("basis is singular on refactorization".into()))
    }

    /// `x_B = B^-1 (b - N x_N)`.
    fn recompute_beta(&mut self) {
        let n = self.n;
        let mut r = self.sf.rhs.clone();
        for (k, row) in self.sf.rows.iter().enumerate() {
            for &(j, a) in row {
                if self.pos[j] == usize::MAX {
                    r[k] -= a * self.val[j];
                }
            }
            if self.pos[n + k] == usize::MAX {
                r[k] -= self.val[n + k];
            }
        }
        self.factor.ftran(&mut r);
        self.beta = r;
    }

    fn value_of(&self, j: usize) -> f64 {
        match self.pos[j] {
            usize::MAX => self.val[j],
            i => self.beta[i],
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.value_of(j)).collect()
    }

    /// Largest row or bound violation of the current point, in original data.
    fn primal_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let x = self.structural_values();
        for (j, &v) in x.iter().enumerate() {
            let (lo, up) = self.original_bounds(j);
            worst = worst.max(lo - v).max(v - up);
        }
        for (k, row) in self.sf.rows.iter().enumerate() {
            let lhs: f64 = row.iter().map(|&(j, a)| a * x[j]).sum();
            worst = worst.max(self.sf.senses[k].violation(lhs, self.sf.rhs[k]));
        }
        worst
    }

    fn infeasibility(&self, i: usize) -> f64 {
        let b = self.basis[i];
        (self.lo[b] - self.beta[i]).max(self.beta[i] - self.up[b]).max(0.0)
    }

    fn run(&mut self) -> Result<Outcome> {
        if !self.iterate(Phase::One)? {
            return Ok(Outcome::Infeasible);
        }
        if !self.iterate(Phase::Two)? {
            return Ok(Outcome::Unbounded);
        }
        Ok(Outcome::Optimal)
    }

    /// Basic costs: phase-1 infeasibility weights, or the objective. `None`
    /// in phase 1 once every basic variable is within bounds.
    fn basic_costs(&self, phase: Phase) -> Option<Vec<f64>> {
        match phase {
            Phase::Two => Some(self.basis.iter().map(|&b| self.cost[b]).collect()),
            Phase::One => {
                let mut any = false;
                let w = (0..self.m)
                    .map(|i| {
                        let b = self.basis[i];
                        if self.beta[i] < self.lo[b] - PHASE1_TOL {
                            any = true;
                            -1.0
                        } else if self.beta[i] > self.up[b] + PHASE1_TOL {
                            any = true;
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                any.then_some(w)
            }
        }
    }

    /// `d_j = c_j - y·a_j` for every nonbasic column, with `y = B^-T c_B`.
    fn price_all(&mut self, mut y: Vec<f64>, phase: Phase) {
        self.factor.btran(&mut y);
        let n = self.n;
        for j in 0..n + self.m {
            if self.pos[j] != usize::MAX {
                self.d[j] = 0.0;
                continue;
            }
            let c = if phase == Phase::Two { self.cost[j] } else { 0.0 };
            self.d[j] = if j < n {
                c - self.cols[j].iter().map(|&(i, a)| a * y[i]).sum::<f64>()
            } else {
                c - y[j - n]
            };
        }
    }

    /// Returns false on an unbounded ray (phase 2) or an infeasible
    /// problem (phase 1).
    fn iterate(&mut self, phase: Phase) -> Result<bool> {
        let mut since_refactor = self.factor.num_etas();
        self.weights.iter_mut().for_each(|w| *w = 1.0);
        // phase-2 reduced costs are updated along pivots and recomputed from
        // scratch after refactorization and before declaring optimality
        let mut exact = false;
        loop {
            if phase == Phase::One || !exact {
                let Some(cb) = self.basic_costs(phase) else {
                    return Ok(true);
                };
                self.price_all(cb, phase);
                exact = true;
            }
            let Some((q, dir)) = self.choose_entering() else {
                if phase == Phase::One {
                    let worst = (0..self.m).map(|i| self.infeasibility(i)).fold(0.0, f64::max);
                    return Ok(worst <= tol::FEAS);
                }
                if !exact {
                    continue;
                }
                return Ok(true);
            };
            let mut alpha = std::mem::take(&mut self.work);
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for (i, a) in self.column(q) {
                alpha[i] = a;
            }
            self.factor.ftran(&mut alpha);
            let Some(step) = self.ratio_test(&alpha, q, dir, phase == Phase::One) else {
                self.work = alpha;
                if phase == Phase::One {
                    return Err(Error::NumericalBreakdown("phase-1 ratio test found no blocking variable".into()));
                }
                return Ok(false);
            };
            if let Some((r, _)) = step.leave {
                self.update_pricing(q, r, alpha[r], phase);
                exact = false;
            }
            let pivoted = self.apply(q, dir, step, &alpha);
            self.work = alpha;
            if pivoted? {
                since_refactor += 1;
                if since_refactor >= REFACTOR_EVERY || self.factor.eta_heavy() {
                    self.refactor()?;
                    since_refactor = 0;
                    exact = false;
                }
            }
        }
    }

    /// Before `q` replaces the basic variable at position `r`: updates the
    /// Devex reference weights and, in phase 2, the reduced costs, both from
    /// row `r` of `B^-1 A`.
    fn update_pricing(&mut self, q: usize, r: usize, pivot: f64, phase: Phase) {
        let (n, m) = (self.n, self.m);
        let mut rho = vec![0.0; m];
        rho[r] = 1.0;
        self.factor.btran(&mut rho);
        let mut touched = Vec::new();
        for (i, &p) in rho.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(j, a) in self.sf.rows[i].iter().chain(std::iter::once(&(n + i, 1.0))) {
                if !self.mark[j] {
                    self.mark[j] = true;
                    touched.push(j);
                }
                self.arow[j] += p * a;
            }
        }
        let leaving = self.basis[r];
        let ratio = self.d[q] / pivot;
        let wq = self.weights[q];
        for &j in &touched {
            let a = self.arow[j];
            self.arow[j] = 0.0;
            self.mark[j] = false;
            if self.pos[j] != usize::MAX || j == q || a == 0.0 {
                continue;
            }
            if phase == Phase::Two {
                self.d[j] -= ratio * a;
            }
            let g = a / pivot;
            self.weights[j] = self.weights[j].max(g * g * wq);
        }
        if phase == Phase::Two {
            self.d[leaving] = -ratio;
            self.d[q] = 0.0;
        }
        self.weights[leaving] = (wq / (pivot * pivot)).max(1.0);
        if self.weights[leaving] > DEVEX_RESET {
            self.weights.iter_mut().for_each(|w| *w = 1.0);
        }
    }

    /// Entering column and direction (+1 increase, -1 decrease), if any.
    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.n + self.m {
            if self.pos[j] != usize::MAX {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -DJ_TOL && self.val[j] < self.up[j] {
                1.0
            } else if dj > DJ_TOL && self.val[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((j, dir));
            }
            let score = dj * dj / self.weights[j];
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    /// Ratio test for moving column `q` in direction `dir`, where `alpha` is
    /// its representation in the current basis. In phase 1, infeasible basic
    /// variables block only when they reach the bound they violate.
    ///
    /// Outside Bland mode this is a two-pass Harris test: bounds are relaxed
    /// by [`HARRIS`] to find the step limit, then the largest pivot within
    /// that limit leaves.
    fn ratio_test(&self, alpha: &[f64], q: usize, dir: f64, phase1: bool) -> Option<Step> {
        let relax = if self.bland { 0.0 } else { HARRIS };
        // (position, exact ratio, relaxed ratio, bound reached)
        let mut limits: Vec<(usize, f64, f64, f64)> = Vec::new();
        for (i, &a) in alpha.iter().enumerate() {
            let a = dir * a;
            if a.abs() <= RATIO_PIVOT {
                continue;
            }
            let b = self.basis[i];
            let (lo, up, x) = (self.lo[b], self.up[b], self.beta[i]);
            let below = phase1 && x < lo - PHASE1_TOL;
            let above = phase1 && x > up + PHASE1_TOL;
            let hit = if a > 0.0 {
                // the basic variable decreases
                if below {
                    None
                } else if above {
                    Some((x - up, up))
                } else if lo.is_finite() {
                    Some((x - lo, lo))
                } else {
                    None
                }
            } else if above {
                None
            } else if below {
                Some((lo - x, lo))
            } else if up.is_finite() {
                Some((up - x, up))
            } else {
                None
            };
            if let Some((gap, bound)) = hit {
                let a = a.abs();
                limits.push((i, (gap / a).max(0.0), ((gap + relax) / a).max(0.0), bound));
            }
        }
        let theta_max = limits.iter().map(|l| l.2).fold(f64::INFINITY, f64::min);
        let flip = self.up[q] - self.lo[q];
        if flip.is_finite() && flip <= theta_max {
            return Some(Step { theta: flip, leave: None });
        }
        if !theta_max.is_finite() {
            return None;
        }
        let mut chosen: Option<(usize, f64, f64)> = None;
        if self.bland {
            let slack = 1e-12 * theta_max.max(1.0);
            for &(i, e, _, b) in &limits {
                if e <= theta_max + slack && chosen.map_or(true, |(r, _, _)| self.basis[i] < self.basis[r]) {
                    chosen = Some((i, e, b));
                }
            }
        } else {
            let mut best_alpha = 0.0;
            for &(i, e, _, b) in &limits {
                if e <= theta_max && alpha[i].abs() > best_alpha {
                    best_alpha = alpha[i].abs();
                    chosen = Some((i, e, b));
                }
            }
        }
        chosen.map(|(r, e, b)| Step { theta: e, leave: Some((r, b)) })
    }

    /// Moves along the step; returns true when the basis changed.
    fn apply(&mut self, q: usize, dir: f64, step: Step, alpha: &[f64]) -> Result<bool> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::IterationLimit(self.max_iterations));
        }
        if step.theta < tol::DEGENERATE {
            self.degenerate += 1;
            if !self.bland && self.degenerate > BLAND_AFTER {
                log::debug!("switching to Bland pricing after {} degenerate pivots", self.degenerate);
                self.bland = true;
            }
        } else {
            self.degenerate = 0;
            self.bland = false;
        }
        let delta = dir * step.theta;
        if delta != 0.0 {
            for (b, &a) in self.beta.iter_mut().zip(alpha) {
                if a != 0.0 {
                    *b -= a * delta;
                }
            }
        }
        let Some((r, bound)) = step.leave else {
            self.val[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
            return Ok(false);
        };
        if alpha[r].abs() < tol::BREAKDOWN {
            return Err(Error::NumericalBreakdown(format!("pivot {:.3e} below breakdown threshold", alpha[r])));
        }
        let leaving = self.basis[r];
        // a leaving variable already past its bound keeps its value and the
        // bound moves out to it; snapping would break B x_B + N x_N = b
        let reached = self.beta[r];
        let value = if bound == self.lo[leaving] && reached < bound {
            self.lo[leaving] = reached;
            reached
        } else if bound == self.up[leaving] && reached > bound {
            self.up[leaving] = reached;
            reached
        } else {
            bound
        };
        self.pos[leaving] = usize::MAX;
        self.val[leaving] = value;
        self.basis[r] = q;
        self.pos[q] = r;
        self.beta[r] = self.val[q] + delta;
        self.factor.push_eta(r, alpha);
        Ok(true)
    }

    /// Checks from scratch that no nonbasic column prices out by more than
    /// the feasibility tolerance.
    fn certify_reduced_costs(&mut self) -> bool {
        let cb = self.basic_costs(Phase::Two).expect("phase 2 always has costs");
        self.price_all(cb, Phase::Two);
        (0..self.n + self.m).all(|j| {
            self.pos[j] != usize::MAX || {
                let dj = self.d[j];
                !((dj < -tol::FEAS && self.val[j] < self.up[j]) || (dj > tol::FEAS && self.val[j] > self.lo[j]))
            }
        })
    }
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

fn initial_value(lo: f64, up: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if up.is_finite() {
        up
    } else {
        0.0
    }
}

