//! Seeded generators for the three benchmark families.
//!
//! * TPESC: transportation with exclusive sources. Minimize shipping cost
//!   from sources `S` to sinks `D` with integral supplies and demands; two
//!   conflicting sources may not both ship to the same sink.
//! * CMKPC: continuous multi-dimensional knapsack with a random conflict graph.
//! * 1R: an LPCC whose conflict graph is a perfect matching between `y` and `z`.
//!
//! Every generator draws from one ChaCha8 stream seeded with the spec's seed,
//! so equal specs give byte-identical instances.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::erdos_renyi_edges;
use crate::instance::LpccInstance;
use crate::linear::{Direction, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "TPESC")]
    Tpesc,
    #[serde(rename = "CMKPC")]
    Cmkpc,
    #[serde(rename = "ONE_REG")]
    OneRegular,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Tpesc => "TPESC",
            Family::Cmkpc => "CMKPC",
            Family::OneRegular => "1R",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GenSpec {
    Tpesc { sources: usize, sinks: usize, rho: f64, seed: u64 },
    Cmkpc { n: usize, m: usize, rho: f64, seed: u64 },
    /// `n` complementary pairs, `p` x-variables in `[0, 1]`, `m` rows. With
    /// `single_theta` one draw of theta scales every right-hand side.
    OneRegular { n: usize, p: usize, m: usize, seed: u64, single_theta: bool },
}

impl GenSpec {
    pub fn tpesc(sources: usize, sinks: usize, rho: f64, seed: u64) -> Self {
        GenSpec::Tpesc { sources, sinks, rho, seed }
    }

    pub fn cmkpc(n: usize, m: usize, rho: f64, seed: u64) -> Self {
        GenSpec::Cmkpc { n, m, rho, seed }
    }

    pub fn one_regular(n: usize, p: usize, m: usize, seed: u64) -> Self {
        GenSpec::OneRegular { n, p, m, seed, single_theta: false }
    }

    pub fn family(&self) -> Family {
        match self {
            GenSpec::Tpesc { .. } => Family::Tpesc,
            GenSpec::Cmkpc { .. } => Family::Cmkpc,
            GenSpec::OneRegular { .. } => Family::OneRegular,
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            GenSpec::Tpesc { seed, .. } | GenSpec::Cmkpc { seed, .. } | GenSpec::OneRegular { seed, .. } => seed,
        }
    }

    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            GenSpec::Tpesc { seed, .. } | GenSpec::Cmkpc { seed, .. } | GenSpec::OneRegular { seed, .. } => {
                *seed = new_seed
            }
        }
        out
    }

    /// Size and density tuple as printed in result tables, e.g. `(20, 5, 0.35)`.
    pub fn config_label(&self) -> String {
        match *self {
            GenSpec::Tpesc { sources, sinks, rho, .. } => format!("({sources}, {sinks}, {rho})"),
            GenSpec::Cmkpc { n, m, rho, .. } => format!("({n}, {m}, {rho})"),
            GenSpec::OneRegular { n, p, m, .. } => format!("({n}, {p}, {m})"),
        }
    }

    /// Number of y variables of the generated instance.
    pub fn num_y(&self) -> usize {
        match *self {
            GenSpec::Tpesc { sources, sinks, .. } => sources * sinks,
            GenSpec::Cmkpc { n, .. } => n,
            GenSpec::OneRegular { n, .. } => 2 * n,
        }
    }

    fn check(&self) -> Result<()> {
        let (sizes, rho): (Vec<usize>, f64) = match *self {
            GenSpec::Tpesc { sources, sinks, rho, .. } => (vec![sources, sinks], rho),
            GenSpec::Cmkpc { n, m, rho, .. } => (vec![n, m], rho),
            GenSpec::OneRegular { n, p, m, .. } => (vec![n, p, m], 0.0),
        };
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidModel(format!("{self:?}: sizes must be positive")));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidModel(format!("{self:?}: rho must lie in [0, 1]")));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<LpccInstance> {
        self.check()?;
        Ok(match *self {
            GenSpec::Tpesc { sources, sinks, rho, seed } => gen_tpesc(sources, sinks, rho, seed),
            GenSpec::Cmkpc { n, m, rho, seed } => gen_cmkpc(n, m, rho, seed),
            GenSpec::OneRegular { n, p, m, seed, single_theta } => gen_one_regular(n, p, m, seed, single_theta),
        })
    }
}

fn int_in<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> f64 {
    rng.random_range(lo..=hi) as f64
}

/// Decrements the larger side round-robin (never below 1) until the sums
/// agree; if that side is stuck at all ones, raises the smaller side instead
/// (never above its cap).
pub fn balance_supply_demand(alpha: &mut [u64], beta: &mut [u64], alpha_cap: u64, beta_cap: u64) {
    let mut cursor_a = 0;
    let mut cursor_b = 0;
    loop {
        let sa: u64 = alpha.iter().sum();
        let sb: u64 = beta.iter().sum();
        if sa == sb {
            return;
        }
        let (big, small, small_cap, big_cursor, small_cursor) = if sa > sb {
            (&mut *alpha, &mut *beta, beta_cap, &mut cursor_a, &mut cursor_b)
        } else {
            (&mut *beta, &mut *alpha, alpha_cap, &mut cursor_b, &mut cursor_a)
        };
        if let Some(k) = next_index(big, *big_cursor, |v| v > 1) {
            big[k] -= 1;
            *big_cursor = (k + 1) % big.len();
        } else if let Some(k) = next_index(small, *small_cursor, |v| v < small_cap) {
            log::info!("supplies and demands cannot be balanced downwards; raising the smaller side");
            small[k] += 1;
            *small_cursor = (k + 1) % small.len();
        } else {
            log::warn!("supplies and demands cannot be balanced");
            return;
        }
    }
}

fn next_index(v: &[u64], start: usize, ok: impl Fn(u64) -> bool) -> Option<usize> {
    (0..v.len()).map(|o| (start + o) % v.len()).find(|&k| ok(v[k]))
}

/// Variable `y[i * |D| + j]` ships from source `i` to sink `j`.
pub fn gen_tpesc(sources: usize, sinks: usize, rho: f64, seed: u64) -> LpccInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sources * sinks;
    let mut inst = LpccInstance::new(Direction::Min, 0, n);
    for c in inst.objective_y.iter_mut() {
        *c = int_in(&mut rng, 3, 8);
    }
    let amax = (sinks / 2).max(1) as u64;
    let bmax = (sources / 2).max(1) as u64;
    let mut alpha: Vec<u64> = (0..sources).map(|_| rng.random_range(1..=amax)).collect();
    let mut beta: Vec<u64> = (0..sinks).map(|_| rng.random_range(1..=bmax)).collect();
    balance_supply_demand(&mut alpha, &mut beta, sinks as u64, sources as u64);
    for (i, &a) in alpha.iter().enumerate() {
        let mut cy = vec![0.0; n];
        for j in 0..sinks {
            cy[i * sinks + j] = 1.0;
        }
        inst.add_row(vec![], cy, Sense::Eq, a as f64).expect("row sizes match");
    }
    for (j, &b) in beta.iter().enumerate() {
        let mut cy = vec![0.0; n];
        for i in 0..sources {
            cy[i * sinks + j] = 1.0;
        }
        inst.add_row(vec![], cy, Sense::Eq, b as f64).expect("row sizes match");
    }
    for (i, k) in erdos_renyi_edges(sources, rho, &mut rng) {
        for j in 0..sinks {
            inst.edges.push((i * sinks + j, k * sinks + j));
        }
    }
    inst
}

pub fn gen_cmkpc(n: usize, m: usize, rho: f64, seed: u64) -> LpccInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = LpccInstance::new(Direction::Max, 0, n);
    for c in inst.objective_y.iter_mut() {
        *c = int_in(&mut rng, 10, 25);
    }
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| int_in(&mut rng, 10, 25)).collect();
        let b = 0.3 * row.iter().sum::<f64>();
        inst.add_row(vec![], row, Sense::Le, b).expect("row sizes match");
    }
    inst.edges = erdos_renyi_edges(n, rho, &mut rng);
    inst
}

/// `sign(b) := 0` for `b = 0`, so the divisor `sign(b) + 0.5` is never zero.
pub fn one_regular_c(b: f64, u: f64) -> f64 {
    let sign = if b > 0.0 {
        1.0
    } else if b < 0.0 {
        -1.0
    } else {
        0.0
    };
    -b + u / (sign + 0.5)
}

/// y-block `0..n` holds `y`, `n..2n` holds `z`; edges pair `y_i` with `z_i`.
/// The box `0 <= x <= 1` is written as rows after the `m` main rows.
pub fn gen_one_regular(n: usize, p: usize, m: usize, seed: u64, single_theta: bool) -> LpccInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = LpccInstance::new(Direction::Max, p, 2 * n);
    for f in inst.objective_x.iter_mut().chain(inst.objective_y.iter_mut()) {
        *f = int_in(&mut rng, -15, 5);
    }
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..p).map(|_| int_in(&mut rng, -20, 30)).collect()).collect();
    let b: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| int_in(&mut rng, -20, 30)).collect()).collect();
    let u: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| int_in(&mut rng, -10, 10)).collect()).collect();
    let thetas: Vec<f64> = if single_theta {
        vec![rng.random::<f64>(); m]
    } else {
        (0..m).map(|_| rng.random::<f64>()).collect()
    };
    for i in 0..m {
        let c: Vec<f64> = (0..n).map(|j| one_regular_c(b[i][j], u[i][j])).collect();
        let total: f64 = b[i].iter().zip(&c).map(|(x, y)| x + y).sum();
        let d = (thetas[i] * total).floor();
        let mut cy = b[i].clone();
        cy.extend(c);
        inst.add_row(a[i].clone(), cy, Sense::Le, d).expect("row sizes match");
    }
    for k in 0..p {
        let mut cx = vec![0.0; p];
        cx[k] = 1.0;
        inst.add_row(cx.clone(), vec![0.0; 2 * n], Sense::Le, 1.0).expect("row sizes match");
        inst.add_row(cx, vec![0.0; 2 * n], Sense::Ge, 0.0).expect("row sizes match");
    }
    inst.edges = (0..n).map(|i| (i, n + i)).collect();
    inst
}
