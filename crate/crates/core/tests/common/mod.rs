#![allow(dead_code)]

pub mod oracle;

use lpcc::gen::GenSpec;
use lpcc::{Direction, LpccInstance};

/// `a` is no better than `b` for `dir`, with an absolute-or-relative slack.
pub fn no_better(dir: Direction, a: f64, b: f64, tol: f64) -> bool {
    dir.score(a) <= dir.score(b) + tol * a.abs().max(b.abs()).max(1.0)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Small instances of every family, cycling through sizes and densities so
/// that `count` specs cover all three generators. `max_y` caps the number of
/// y variables.
pub fn mixed_specs(count: usize, max_y: usize, first_seed: u64) -> Vec<GenSpec> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0u64;
    while out.len() < count {
        let seed = first_seed + k;
        let spec = match k % 3 {
            0 => {
                let s = 2 + (k / 3) as usize % 4;
                let d = 2 + (k / 5) as usize % 4;
                GenSpec::tpesc(s, d, [0.3, 0.5, 0.8][(k / 3) as usize % 3], seed)
            }
            1 => {
                let n = 4 + (k / 3) as usize % 17;
                GenSpec::cmkpc(n, 1 + (k / 3) as usize % 4, [0.1, 0.3, 0.5][(k / 7) as usize % 3], seed)
            }
            _ => {
                let n = 1 + (k / 3) as usize % 6;
                GenSpec::one_regular(n, 1 + (k / 3) as usize % 4, 1 + (k / 5) as usize % 4, seed)
            }
        };
        if spec.num_y() <= max_y {
            out.push(spec);
        }
        k += 1;
    }
    out
}

pub fn generate(spec: &GenSpec) -> LpccInstance {
    spec.generate().expect("generator specs are valid")
}

/// One line per acceptance criterion, in a fixed format.
/// Written straight to stderr so it shows even when output is captured.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" }
    );
}
