//! LP solving and LP-file export for [`LinearModel`]s.

mod export;
mod lu;
mod simplex;

use crate::error::Result;
use crate::linear::{Direction, LinearModel, Solution, SolveStatus};
use crate::tol;

pub use export::{export_lp_file, format_number, write_lp};
pub use simplex::{Basis, BasisStatus, StandardForm, BLAND_AFTER};

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: SolveStatus,
    /// Objective value, defined iff the status is optimal.
    pub value: Option<f64>,
    /// One value per model column (empty unless optimal).
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Lazy rows that had to be switched on to reach the optimum.
    pub activated: Vec<usize>,
    /// Optimal basis over the model columns and then all model rows, with
    /// inactive lazy rows basic. Accepted by [`solve_from`].
    pub basis: Option<Basis>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn to_solution(&self, model: &LinearModel) -> Solution {
        Solution {
            status: self.status,
            value: self.value,
            assignment: if self.is_optimal() { model.named_assignment(&self.x) } else { Default::default() },
        }
    }
}

/// Converts the chosen rows of `model` into simplex input.
pub fn standard_form(model: &LinearModel, rows: &[usize]) -> StandardForm {
    let sign = match model.direction() {
        Direction::Max => -1.0,
        Direction::Min => 1.0,
    };
    let cons = model.constraints();
    StandardForm {
        lower: model.variables().iter().map(|v| v.lower).collect(),
        upper: model.variables().iter().map(|v| v.upper).collect(),
        rows: rows.iter().map(|&r| cons[r].terms.clone()).collect(),
        senses: rows.iter().map(|&r| cons[r].sense).collect(),
        rhs: rows.iter().map(|&r| cons[r].rhs).collect(),
        cost: model.objective().iter().map(|c| sign * c).collect(),
    }
}

/// Solves `model` with the two-phase bounded simplex.
///
/// Lazy rows start inactive; whenever the optimum of the active rows violates
/// some of them, those rows are switched on and the LP is solved again from
/// scratch, so the result is the optimum of the full model.
pub fn solve(model: &LinearModel) -> Result<LpResult> {
    solve_from(model, None)
}

/// Like [`solve`], starting from the basis of an earlier solve of a model
/// with the same columns and rows (bounds and costs may differ).
pub fn solve_from(model: &LinearModel, start: Option<&Basis>) -> Result<LpResult> {
    model.validate()?;
    let cons = model.constraints();
    let mut active: Vec<bool> = cons.iter().map(|c| !c.lazy).collect();
    let mut activated = Vec::new();
    let mut iterations = 0;
    let n = model.num_cols();
    let mut full = start.filter(|b| b.len() == n + cons.len()).cloned();
    loop {
        let rows: Vec<usize> = (0..cons.len()).filter(|&r| active[r]).collect();
        let sf = standard_form(model, &rows);
        let start = full.as_ref().map(|b| {
            let mut sub = b[..n].to_vec();
            sub.extend(rows.iter().map(|&r| b[n + r]));
            sub
        });
        let started = std::time::Instant::now();
        let res = simplex::solve_from(&sf, start.as_ref())?;
        log::debug!(
            "simplex: {} rows, {} cols, {} iterations, {:?} in {:.3}s",
            sf.num_rows(),
            sf.num_cols(),
            res.iterations,
            res.outcome,
            started.elapsed().as_secs_f64()
        );
        iterations += res.iterations;
        match res.outcome {
            simplex::Outcome::Infeasible => {
                return Ok(LpResult {
                    status: SolveStatus::Infeasible,
                    value: None,
                    x: Vec::new(),
                    iterations,
                    activated,
                    basis: None,
                })
            }
            simplex::Outcome::Unbounded => {
                let pending: Vec<usize> = (0..cons.len()).filter(|&r| !active[r]).collect();
                if pending.is_empty() {
                    log::warn!("LP is unbounded; x may need explicit bounds");
                    return Ok(LpResult {
                        status: SolveStatus::Unbounded,
                        value: None,
                        x: Vec::new(),
                        iterations,
                        activated,
                        basis: None,
                    });
                }
                for r in pending {
                    active[r] = true;
                    activated.push(r);
                }
            }
            simplex::Outcome::Optimal => {
                full = res.basis.as_ref().map(|b| {
                    let mut all = b[..n].to_vec();
                    all.resize(n + cons.len(), BasisStatus::Basic);
                    for (k, &r) in rows.iter().enumerate() {
                        all[n + r] = b[n + k];
                    }
                    all
                });
                let x = res.x;
                let violated: Vec<usize> = (0..cons.len())
                    .filter(|&r| !active[r] && cons[r].violation(&x) > tol::FEAS * 0.1)
                    .collect();
                if violated.is_empty() {
                    let value = model.evaluate_objective(&x);
                    activated.sort_unstable();
                    return Ok(LpResult {
                        status: SolveStatus::Optimal,
                        value: Some(value),
                        x,
                        iterations,
                        activated,
                        basis: full,
                    });
                }
                for r in violated {
                    active[r] = true;
                    activated.push(r);
                }
            }
        }
    }
}
