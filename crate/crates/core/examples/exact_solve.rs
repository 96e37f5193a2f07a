//! Solve a 1-regular instance exactly, confirm the result by brute force and
//! write the big-M MIP for an external solver.

use lpcc::exact::{self, ExactOptions};
use lpcc::gen::GenSpec;

fn main() -> lpcc::Result<()> {
    let inst = GenSpec::one_regular(6, 4, 4, 9).generate()?;
    let ex = exact::solve_exact(&inst, &ExactOptions::default())?;
    println!("branch-and-bound: {:?} ({:?}, {} nodes)", ex.value, ex.status, ex.nodes);
    println!("enumeration:      {:?}", exact::brute_force_oracle(&inst)?);

    if let Some(p) = &ex.point {
        let report = inst.evaluate(&p.x, &p.y)?;
        println!("incumbent feasible: {}", report.is_feasible());
        println!("y = {:?}", p.y);
    }

    let path = std::env::temp_dir().join("one_regular_bigm.lp");
    exact::export_bigm_mip(&inst, &path)?;
    println!("big-M model written to {}", path.display());
    Ok(())
}
