//! Small random LPs and a vertex-enumeration oracle for them.

use lpcc::lp;
use lpcc::{Direction, LinearModel, Sense, SolveStatus};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct RandomLp {
    dir: Direction,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Sense, f64)>,
}

impl RandomLp {
    pub fn draw(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(0..=8);
        let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-2..=0) as f64).collect();
        let upper = lower.iter().map(|l| l + rng.random_range(1..=4) as f64).collect();
        let cost = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let rows = (0..m)
            .map(|_| {
                let a: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
                let sense = match rng.random_range(0..20) {
                    0..=11 => Sense::Le,
                    12..=16 => Sense::Ge,
                    _ => Sense::Eq,
                };
                (a, sense, rng.random_range(-6..=12) as f64)
            })
            .collect();
        let dir = if rng.random_bool(0.5) { Direction::Max } else { Direction::Min };
        RandomLp { dir, lower, upper, cost, rows }
    }

    pub fn model(&self) -> LinearModel {
        let mut m = LinearModel::new(self.dir);
        for j in 0..self.cost.len() {
            let c = m.add_variable(format!("x{j}"), self.lower[j], self.upper[j]).unwrap();
            m.set_objective(c, self.cost[j]);
        }
        for (a, sense, b) in &self.rows {
            let terms = a.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (j, v)).collect();
            m.add_constraint(terms, *sense, *b).unwrap();
        }
        m
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let tol = 1e-9;
        let in_box = x.iter().enumerate().all(|(j, &v)| v >= self.lower[j] - tol && v <= self.upper[j] + tol);
        in_box
            && self.rows.iter().all(|(a, sense, b)| {
                let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                let scale = tol * (1.0 + b.abs());
                match sense {
                    Sense::Le => lhs <= b + scale,
                    Sense::Ge => lhs >= b - scale,
                    Sense::Eq => (lhs - b).abs() <= scale,
                }
            })
    }

    /// Best objective over all basic feasible solutions; `None` if there are none.
    /// Every variable is boxed, so a nonempty feasible set has a vertex optimum.
    pub fn enumerate(&self) -> Option<f64> {
        let n = self.cost.len();
        let mut planes: Vec<(Vec<f64>, f64)> = self.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            planes.push((e.clone(), self.lower[j]));
            planes.push((e, self.upper[j]));
        }
        let mut best: Option<f64> = None;
        for subset in combinations(planes.len(), n) {
            let a = DMatrix::from_fn(n, n, |r, c| planes[subset[r]].0[c]);
            let b = DVector::from_fn(n, |r, _| planes[subset[r]].1);
            let Some(x) = a.lu().solve(&b) else { continue };
            if x.iter().any(|v| !v.is_finite()) || !self.feasible(x.as_slice()) {
                continue;
            }
            let v: f64 = self.cost.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
            if best.map_or(true, |b| self.dir.score(v) > self.dir.score(b)) {
                best = Some(v);
            }
        }
        best
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Runs `count` random LPs and returns a description of every mismatch.
pub fn random_lp_mismatches(count: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut infeasible = 0;
    let mut bad = Vec::new();
    for k in 0..count {
        let lp = RandomLp::draw(&mut rng);
        let model = lp.model();
        let res = lp::solve(&model).unwrap();
        match (lp.enumerate(), res.status) {
            (None, SolveStatus::Infeasible) => infeasible += 1,
            (Some(v), SolveStatus::Optimal) => {
                let got = res.value.unwrap();
                if !super::close(got, v, 1e-8) {
                    bad.push(format!("lp {k}: simplex {got}, enumeration {v}"));
                }
                if model.max_violation(&res.x).0 > 1e-7 {
                    bad.push(format!("lp {k}: returned point violates the model"));
                }
            }
            (expected, status) => bad.push(format!("lp {k}: simplex {status:?}, enumeration {expected:?}")),
        }
    }
    (infeasible, bad)
}
