//! Compare the three relaxations of one CMKPC instance and check that the
//! lift of an exact solution is feasible for the extended model.

use lpcc::exact::{self, ExactOptions};
use lpcc::gen::GenSpec;
use lpcc::{lp, relax};

fn main() -> lpcc::Result<()> {
    let inst = GenSpec::cmkpc(14, 3, 0.35, 5).generate()?;
    for (name, art) in [
        ("LP", relax::build_lp_relaxation(&inst)?),
        ("ER-ee", relax::build_edge_relaxation(&inst)?),
        ("ER-vc", relax::build_default_cover_relaxation(&inst)?),
    ] {
        let r = lp::solve(&art.model)?;
        println!(
            "{name:6} value {:>10.4} rows {:5} cols {:5} blocks {:3}",
            r.value.unwrap_or(f64::NAN),
            art.model.num_rows(),
            art.model.num_cols(),
            art.blocks.len()
        );
    }

    let ex = exact::solve_exact(&inst, &ExactOptions::default())?;
    println!("exact  value {:>10.4} after {} nodes", ex.value.unwrap_or(f64::NAN), ex.nodes);

    if let Some(p) = &ex.point {
        let cover = relax::build_default_cover_relaxation(&inst)?;
        let lifted = cover.lift(&p.x, &p.y);
        let (worst, row) = cover.model.max_violation(&lifted);
        println!("lifted optimum: worst violation {worst:.2e} {}", row.unwrap_or_default());
    }
    Ok(())
}
