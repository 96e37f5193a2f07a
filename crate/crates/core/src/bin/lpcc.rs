use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lpcc::bench::{self, BenchOptions, Method};
use lpcc::gen::GenSpec;
use lpcc::{exact, relax, LpccInstance};

#[derive(Parser)]
#[command(name = "lpcc", version, about = "Extended relaxations and exact solves for LPs with complementarity constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance as JSON.
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the gap experiment and write CSV and markdown tables.
    Bench(BenchArgs),
    /// Print the conflict graph of an instance in DOT format.
    Dot {
        instance: PathBuf,
    },
    /// Write a relaxation, or the big-M MIP, of an instance in LP format.
    Export {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "er-vc")]
        model: ExportModel,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance exactly.
    Solve {
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Tpesc,
    Cmkpc,
    #[value(alias = "1r", alias = "one-reg")]
    OneRegular,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportModel {
    Lp,
    ErEe,
    ErVc,
    Mip,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// TPESC sources.
    #[arg(long)]
    s: Option<usize>,
    /// TPESC sinks.
    #[arg(long)]
    d: Option<usize>,
    /// CMKPC items, or 1R complementary pairs.
    #[arg(long)]
    n: Option<usize>,
    /// CMKPC knapsack rows, or 1R rows.
    #[arg(long)]
    m: Option<usize>,
    /// 1R x-variables.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// 1R: one theta for every row.
    #[arg(long)]
    single_theta: bool,
}

impl SpecArgs {
    fn spec(&self, seed: u64) -> Result<GenSpec, String> {
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| format!("--{name} is required for this family"));
        Ok(match self.family {
            FamilyArg::Tpesc => GenSpec::tpesc(need(self.s, "s")?, need(self.d, "d")?, self.rho, seed),
            FamilyArg::Cmkpc => GenSpec::cmkpc(need(self.n, "n")?, need(self.m, "m")?, self.rho, seed),
            FamilyArg::OneRegular => GenSpec::OneRegular {
                n: need(self.n, "n")?,
                p: need(self.p, "p")?,
                m: need(self.m, "m")?,
                seed,
                single_theta: self.single_theta,
            },
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Run one configuration instead of the presets.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Number of seeds per configuration.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 1)]
    first_seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "lp,er-ee,er-vc,er-vc-cuts")]
    methods: Vec<String>,
    /// Include the larger configurations.
    #[arg(long)]
    large: bool,
    /// Also check the singleton-cover relaxation against ER-ee.
    #[arg(long)]
    dominance: bool,
    /// Per-instance exact-solve budget in seconds.
    #[arg(long, env = "LPCC_TIME_LIMIT")]
    time_limit: Option<f64>,
    #[arg(long, default_value = "gaps.csv")]
    csv: PathBuf,
    #[arg(long, default_value = "gaps.md")]
    md: PathBuf,
}

fn bench_cmd(args: &BenchArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let configs = match args.family {
        Some(family) => {
            let spec = SpecArgs {
                family,
                s: args.s,
                d: args.d,
                n: args.n,
                m: args.m,
                p: args.p,
                rho: args.rho,
                single_theta: false,
            };
            vec![spec.spec(0)?]
        }
        None if args.large => [bench::default_presets(), bench::large_presets()].concat(),
        None => bench::default_presets(),
    };
    let methods = args.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>, _>>()?;
    let mut opts = BenchOptions { methods, dominance: args.dominance, ..BenchOptions::default() };
    if let Some(t) = args.time_limit {
        opts.time_limit = Duration::from_secs_f64(t);
    }
    let seeds: Vec<u64> = (args.first_seed..args.first_seed + args.seeds).collect();
    let report = bench::run_experiment(&configs, &seeds, &opts)?;
    bench::write_csv(&report, BufWriter::new(File::create(&args.csv)?))?;
    bench::write_markdown(&report, BufWriter::new(File::create(&args.md)?))?;
    let failures: Vec<_> = report.failures().collect();
    for f in &failures {
        eprintln!("invariant failed: {f}");
    }
    println!("{} instances, {} failures; wrote {} and {}", report.records.len(), failures.len(), args.csv.display(), args.md.display());
    Ok(failures.is_empty())
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Gen { spec, seed, out } => {
            let inst = spec.spec(seed)?.generate()?;
            inst.save(&out)?;
            println!("wrote {} ({} y, {} rows, {} edges)", out.display(), inst.num_y, inst.rows.len(), inst.edges.len());
        }
        Command::Bench(args) => return bench_cmd(&args),
        Command::Dot { instance } => {
            let inst = LpccInstance::load(&instance)?;
            print!("{}", inst.conflict_graph()?.to_dot());
        }
        Command::Export { instance, model, out } => {
            let inst = LpccInstance::load(&instance)?.normalize()?;
            let art = match model {
                ExportModel::Lp => relax::build_lp_relaxation(&inst)?,
                ExportModel::ErEe => relax::build_edge_relaxation(&inst)?,
                ExportModel::ErVc => relax::build_default_cover_relaxation(&inst)?,
                ExportModel::Mip => {
                    exact::export_bigm_mip(&inst, &out)?;
                    return Ok(true);
                }
            };
            lpcc::lp::export_lp_file(&art.model, &out)?;
        }
        Command::Solve { instance } => {
            let inst = LpccInstance::load(&instance)?;
            let opts = exact::ExactOptions { time_limit: exact::time_limit_from_env(), ..Default::default() };
            let res = exact::solve_exact(&inst, &opts)?;
            match res.value {
                Some(v) => println!("{:?} optimum {v} after {} nodes", res.status, res.nodes),
                None => println!("{:?} no feasible point after {} nodes", res.status, res.nodes),
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
