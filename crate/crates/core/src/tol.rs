//! Numerical tolerances shared by every module.

/// Primal feasibility of rows and bounds.
pub const FEAS: f64 = 1e-7;
/// A complementarity pair counts as violated when `y_i * y_j` exceeds this.
pub const COMPLEMENTARITY: f64 = 1e-8;
/// Smallest admissible simplex pivot element.
pub const PIVOT: f64 = 1e-9;
/// Step lengths below this count as degenerate pivots.
pub const DEGENERATE: f64 = 1e-10;
/// Pivot magnitude below which the basis is declared numerically singular.
pub const BREAKDOWN: f64 = 1e-11;
/// Minimum violation for a separated cut to be reported.
pub const CUT_VIOLATION: f64 = 1e-6;
