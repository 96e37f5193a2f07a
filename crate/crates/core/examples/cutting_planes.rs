//! Strengthen the cover relaxation with the static cut families and then the
//! BQP separation loop, printing what each stage contributes.

use lpcc::cuts::{self, CutOptions};
use lpcc::gen::GenSpec;
use lpcc::{lp, relax};

fn main() -> lpcc::Result<()> {
    let inst = GenSpec::cmkpc(16, 4, 0.5, 3).generate()?;
    let g = inst.conflict_graph()?;
    let cover = relax::build_default_cover_relaxation(&inst)?;
    let partition = cover.partition.clone().expect("cover relaxations carry their partition");
    println!("ER-vc: {:.4}", lp::solve(&cover.model)?.value.unwrap_or(f64::NAN));

    let pool = cuts::static_cuts(&g, &partition, &CutOptions::default());
    let with_cuts = cuts::apply_cuts(&cover, &pool)?;
    println!("static cuts: {:.4}", lp::solve(&with_cuts.model)?.value.unwrap_or(f64::NAN));
    for (family, count) in &with_cuts.cut_counts {
        println!("  {family:?}: {count}");
    }

    let out = cuts::iterate_bqp_separation(&with_cuts)?;
    println!("BQP loop: {:?} after {} solves ({:?}), {} cuts added", out.values, out.rounds, out.stop, out.cuts_added);

    if let Some(cut) = pool.first() {
        let mut json = Vec::new();
        cuts::write_cut_pool(std::slice::from_ref(cut), &mut json)?;
        println!("first cut: {}", String::from_utf8_lossy(&json));
    }
    Ok(())
}
