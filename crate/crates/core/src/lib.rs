//! Linear relaxations for linear programs with complementarity constraints.
//!
//! An LPCC maximizes or minimizes `a·x + b·y` over linear rows with
//! `0 <= y <= 1` and `y_i * y_j = 0` for every edge of a conflict graph.
//! This crate builds three relaxations of such a problem, strengthens the
//! strongest of them with cutting planes, computes the exact optimum by
//! branch-and-bound, and generates the benchmark families used to compare
//! them:
//!
//! * [`relax`]: the plain LP relaxation, the edge-by-edge extended relaxation
//!   and the vertex-cover based extended relaxation.
//! * [`cuts`]: stable-set cuts and their lifts, clique cuts on the group
//!   indicators and the boolean-quadric separation loop.
//! * [`exact`]: complementarity branch-and-bound, a brute-force oracle and a
//!   big-M MIP writer.
//! * [`lp`]: the sparse revised bounded-variable simplex every model is solved with.
//! * [`gen`] and [`bench`]: seeded instance families and gap tables.
//!
//! ```
//! use lpcc::{gen::GenSpec, relax, lp};
//!
//! let inst = GenSpec::cmkpc(12, 3, 0.3, 7).generate().unwrap();
//! let lp_value = lp::solve(&relax::build_lp_relaxation(&inst).unwrap().model)
//!     .unwrap()
//!     .value
//!     .unwrap();
//! let cover = relax::build_default_cover_relaxation(&inst).unwrap();
//! let cover_value = lp::solve(&cover.model).unwrap().value.unwrap();
//! assert!(cover_value <= lp_value + 1e-6);
//! ```

pub mod bench;
pub mod cuts;
pub mod error;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod linear;
pub mod lp;
pub mod relax;
pub mod tol;
pub mod varkey;

pub use error::{Error, Result};
pub use graph::{ConflictGraph, CoverPartition};
pub use instance::LpccInstance;
pub use linear::{Direction, LinearModel, Sense, Solution, SolveStatus};
pub use varkey::{Group, VarKey};
