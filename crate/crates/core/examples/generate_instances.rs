//! Draw one instance of each family, validate it and round-trip it through
//! the JSON format.

use lpcc::gen::GenSpec;
use lpcc::LpccInstance;

fn main() -> lpcc::Result<()> {
    for spec in [GenSpec::tpesc(4, 5, 0.3, 1), GenSpec::cmkpc(10, 2, 0.2, 1), GenSpec::one_regular(5, 3, 4, 1)] {
        let inst = spec.generate()?;
        let json = inst.to_json()?;
        assert_eq!(LpccInstance::from_json(&json)?, inst);
        println!(
            "{} {}: {} x, {} y, {} rows, {} edges, {} diagnostics, {} bytes of JSON",
            spec.family(),
            spec.config_label(),
            inst.num_x,
            inst.num_y,
            inst.num_rows(),
            inst.edges.len(),
            inst.validate().len(),
            json.len()
        );
    }
    Ok(())
}
