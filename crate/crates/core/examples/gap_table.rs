//! A small gap experiment written as markdown to stdout.

use lpcc::bench::{self, BenchOptions};
use lpcc::gen::GenSpec;

fn main() -> lpcc::Result<()> {
    let configs: Vec<GenSpec> = [0.1, 0.3, 0.5].iter().map(|&rho| GenSpec::cmkpc(14, 3, rho, 0)).collect();
    let report = bench::run_experiment(&configs, &[1, 2, 3, 4], &BenchOptions::default())?;
    bench::write_markdown(&report, std::io::stdout())?;
    for failure in report.failures() {
        eprintln!("{failure}");
    }
    Ok(())
}
