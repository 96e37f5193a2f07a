//! Gap experiments: generate instances, solve every relaxation method and the
//! exact problem, and report optimality gaps as CSV rows and markdown tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::cuts::{self, CutFamily, CutOptions, StopReason, BQP_MAX_ROUNDS, BQP_RELATIVE_STOP};
use crate::error::{Error, Result};
use crate::exact::{self, ExactOptions, ExactStatus};
use crate::gen::{Family, GenSpec};
use crate::instance::LpccInstance;
use crate::linear::{Direction, SolveStatus};
use crate::lp;
use crate::relax::{self, RelaxationArtifact};

/// Relative changes below this count as ties when checking orderings.
pub const CHAIN_TOL: f64 = 1e-6;
/// `|v*|` at or below this makes the relative gap undefined.
pub const GAP_ZERO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    #[serde(rename = "LP")]
    Lp,
    #[serde(rename = "ER-ee")]
    ErEe,
    #[serde(rename = "ER-vc")]
    ErVc,
    #[serde(rename = "ER-vc-cuts")]
    ErVcCuts,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lp, Method::ErEe, Method::ErVc, Method::ErVcCuts];

    pub fn label(self) -> &'static str {
        match self {
            Method::Lp => "LP",
            Method::ErEe => "ER-ee",
            Method::ErVc => "ER-vc",
            Method::ErVcCuts => "ER-vc-cuts",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "lp" => Ok(Method::Lp),
            "er-ee" => Ok(Method::ErEe),
            "er-vc" => Ok(Method::ErVc),
            "er-vc-cuts" => Ok(Method::ErVcCuts),
            other => Err(Error::InvalidModel(format!("unknown method {other:?}"))),
        }
    }
}

/// Trace of the BQP separation loop.
#[derive(Debug, Clone, PartialEq)]
pub struct BqpTrace {
    pub rounds: usize,
    pub values: Vec<f64>,
    pub stop: StopReason,
    pub evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub status: SolveStatus,
    pub value: Option<f64>,
    pub rows: usize,
    pub cols: usize,
    pub groups: usize,
    pub cut_counts: BTreeMap<CutFamily, usize>,
    pub bqp: Option<BqpTrace>,
    pub wall: Duration,
}

fn run_from(method: Method, art: &RelaxationArtifact, result: &lp::LpResult, start: Instant) -> MethodRun {
    MethodRun {
        method,
        status: result.status,
        value: result.value,
        rows: art.model.num_rows(),
        cols: art.model.num_cols(),
        groups: art.blocks.len(),
        cut_counts: art.cut_counts.clone(),
        bqp: None,
        wall: start.elapsed(),
    }
}

/// Builds and solves one relaxation method on `inst`.
pub fn method_pipeline(inst: &LpccInstance, method: Method, cut_opts: &CutOptions) -> Result<MethodRun> {
    let start = Instant::now();
    let art = match method {
        Method::Lp => relax::build_lp_relaxation(inst)?,
        Method::ErEe => relax::build_edge_relaxation(inst)?,
        Method::ErVc | Method::ErVcCuts => relax::build_default_cover_relaxation(inst)?,
    };
    if method != Method::ErVcCuts {
        let result = lp::solve(&art.model)?;
        return Ok(run_from(method, &art, &result, start));
    }
    let g = inst.conflict_graph()?;
    let partition = art.partition.clone().expect("cover relaxations carry their partition");
    let art = cuts::apply_cuts_lazy(&art, &cuts::static_cuts(&g, &partition, cut_opts))?;
    let outcome = cuts::iterate_bqp_separation(&art)?;
    let mut run = run_from(method, &outcome.artifact, &outcome.result, start);
    run.bqp = Some(BqpTrace {
        rounds: outcome.rounds,
        values: outcome.values,
        stop: outcome.stop,
        evaluations: outcome.evaluations,
    });
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gap {
    Relative(f64),
    /// `v*` is (numerically) zero; holds `|v_R - v*|`.
    Undefined(f64),
}

pub fn gap(value: f64, exact: f64) -> Gap {
    if exact.abs() <= GAP_ZERO {
        Gap::Undefined((value - exact).abs())
    } else {
        Gap::Relative(((value - exact) / exact).abs())
    }
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Done(MethodRun),
    Failed { method: Method, message: String },
}

impl RunOutcome {
    pub fn method(&self) -> Method {
        match self {
            RunOutcome::Done(r) => r.method,
            RunOutcome::Failed { method, .. } => *method,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            RunOutcome::Done(r) => r.value,
            RunOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceRecord {
    pub spec: GenSpec,
    pub direction: Direction,
    pub exact: Option<f64>,
    pub exact_status: ExactStatus,
    pub exact_nodes: usize,
    pub exact_wall: Duration,
    pub runs: Vec<RunOutcome>,
    /// Cover relaxation over singleton groups, when the dominance check ran.
    pub singleton_value: Option<f64>,
    pub failures: Vec<String>,
}

impl InstanceRecord {
    pub fn run(&self, method: Method) -> Option<&RunOutcome> {
        self.runs.iter().find(|r| r.method() == method)
    }

    pub fn value(&self, method: Method) -> Option<f64> {
        self.run(method).and_then(RunOutcome::value)
    }

    pub fn exact_label(&self) -> &'static str {
        match (self.exact_status, self.exact) {
            (ExactStatus::Timeout, _) => "TIMEOUT",
            (ExactStatus::Proved, None) => "INFEASIBLE",
            (ExactStatus::Proved, Some(_)) => "PROVED",
        }
    }

    pub fn proved(&self) -> Option<f64> {
        match self.exact_status {
            ExactStatus::Proved => self.exact,
            ExactStatus::Timeout => None,
        }
    }

    /// Gap of `method` when `v*` is proved and the relaxation solved.
    pub fn gap(&self, method: Method) -> Option<Gap> {
        Some(gap(self.value(method)?, self.proved()?))
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub methods: Vec<Method>,
    pub time_limit: Duration,
    /// Also solve the singleton-cover relaxation and check it against ER-ee.
    pub dominance: bool,
    pub cuts: CutOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            methods: Method::ALL.to_vec(),
            time_limit: exact::time_limit_from_env(),
            dominance: false,
            cuts: CutOptions::default(),
        }
    }
}

/// `a` is no better than `b` in the direction's sense, up to [`CHAIN_TOL`].
fn no_better(dir: Direction, a: f64, b: f64) -> bool {
    dir.score(a) <= dir.score(b) + CHAIN_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks the orderings and loop contract a record must satisfy.
pub fn check_record(rec: &InstanceRecord) -> Vec<String> {
    let dir = rec.direction;
    let mut out = Vec::new();
    let tag = format!("{} {} seed {}", rec.spec.family(), rec.spec.config_label(), rec.spec.seed());
    for run in &rec.runs {
        if let RunOutcome::Failed { method, message } = run {
            out.push(format!("{tag}: {method} failed: {message}"));
        }
    }
    let mut pairs: Vec<(&str, f64, &str, f64)> = Vec::new();
    if let Some(vs) = rec.proved() {
        for run in &rec.runs {
            if let Some(v) = run.value() {
                pairs.push(("v*", vs, run.method().label(), v));
            }
        }
    }
    let val = |m| rec.value(m);
    if let (Some(a), Some(b)) = (val(Method::ErVcCuts), val(Method::ErVc)) {
        pairs.push(("ER-vc-cuts", a, "ER-vc", b));
    }
    if let (Some(a), Some(b)) = (val(Method::ErEe), val(Method::Lp)) {
        pairs.push(("ER-ee", a, "LP", b));
    }
    if let (Some(a), Some(b)) = (rec.singleton_value, val(Method::ErEe)) {
        pairs.push(("ER-vc(singletons)", a, "ER-ee", b));
    }
    for (na, a, nb, b) in pairs {
        if !no_better(dir, a, b) {
            out.push(format!("{tag}: expected {na} = {a} to be no better than {nb} = {b}"));
        }
    }
    if let (Some(Gap::Relative(gc)), Some(Gap::Relative(gv))) = (rec.gap(Method::ErVcCuts), rec.gap(Method::ErVc)) {
        if gc > gv + 1e-9 {
            out.push(format!("{tag}: ER-vc-cuts gap {gc} exceeds ER-vc gap {gv}"));
        }
    }
    if let Some(RunOutcome::Done(MethodRun { bqp: Some(trace), .. })) = rec.run(Method::ErVcCuts) {
        out.extend(check_bqp_trace(dir, trace).into_iter().map(|m| format!("{tag}: {m}")));
    }
    out
}

/// Round limit, monotone values, and the 1% stopping rule.
pub fn check_bqp_trace(dir: Direction, trace: &BqpTrace) -> Vec<String> {
    let mut out = Vec::new();
    if trace.rounds > BQP_MAX_ROUNDS {
        out.push(format!("BQP loop made {} solves", trace.rounds));
    }
    let v = &trace.values;
    for (k, w) in v.windows(2).enumerate() {
        if !no_better(dir, w[1], w[0]) {
            out.push(format!("BQP round {} moved the bound from {} to {}", k + 2, w[0], w[1]));
        }
        let small = (w[0] - w[1]).abs() < BQP_RELATIVE_STOP * w[1].abs();
        let last = k + 2 == v.len();
        if small && !last {
            out.push(format!("BQP loop continued after a change below 1% at round {}", k + 2));
        }
        if last && trace.stop == StopReason::SmallImprovement && !small {
            out.push("BQP loop stopped for a small change that was not small".into());
        }
    }
    out
}

pub fn run_instance(spec: &GenSpec, opts: &BenchOptions) -> Result<InstanceRecord> {
    let inst = spec.generate()?;
    let start = Instant::now();
    let exact = exact::solve_exact(&inst, &ExactOptions { time_limit: opts.time_limit, collect_leaves: false })?;
    let exact_wall = start.elapsed();
    let runs = opts
        .methods
        .iter()
        .map(|&m| match method_pipeline(&inst, m, &opts.cuts) {
            Ok(run) => RunOutcome::Done(run),
            Err(e) => {
                log::error!("{} seed {}: {m} failed: {e}", spec.config_label(), spec.seed());
                RunOutcome::Failed { method: m, message: e.to_string() }
            }
        })
        .collect();
    let singleton_value = if opts.dominance && !inst.edges.is_empty() {
        lp::solve(&relax::build_singleton_cover_relaxation(&inst)?.model)?.value
    } else {
        None
    };
    let mut rec = InstanceRecord {
        spec: spec.clone(),
        direction: inst.direction,
        exact: exact.value,
        exact_status: exact.status,
        exact_nodes: exact.nodes,
        exact_wall,
        runs,
        singleton_value,
        failures: Vec::new(),
    };
    rec.failures = check_record(&rec);
    for f in &rec.failures {
        log::error!("{f}");
    }
    Ok(rec)
}

#[derive(Debug, Clone, Default)]
pub struct GapReport {
    pub methods: Vec<Method>,
    pub records: Vec<InstanceRecord>,
}

impl GapReport {
    pub fn failures(&self) -> impl Iterator<Item = &String> {
        self.records.iter().flat_map(|r| r.failures.iter())
    }

    pub fn is_clean(&self) -> bool {
        self.failures().next().is_none()
    }

    /// Records grouped by configuration, in first-seen order.
    pub fn by_config(&self) -> Vec<(&GenSpec, Vec<&InstanceRecord>)> {
        let mut out: Vec<(&GenSpec, Vec<&InstanceRecord>)> = Vec::new();
        for rec in &self.records {
            match out.iter_mut().find(|(s, _)| same_config(s, &rec.spec)) {
                Some((_, v)) => v.push(rec),
                None => out.push((&rec.spec, vec![rec])),
            }
        }
        out
    }

    /// Mean relative gap of `method` over records with a defined gap, and how many there were.
    pub fn mean_gap(records: &[&InstanceRecord], method: Method) -> (Option<f64>, usize) {
        let gaps: Vec<f64> = records
            .iter()
            .filter_map(|r| match r.gap(method) {
                Some(Gap::Relative(g)) => Some(g),
                _ => None,
            })
            .collect();
        if gaps.is_empty() {
            (None, 0)
        } else {
            (Some(gaps.iter().sum::<f64>() / gaps.len() as f64), gaps.len())
        }
    }
}

fn same_config(a: &GenSpec, b: &GenSpec) -> bool {
    a.with_seed(0) == b.with_seed(0)
}

/// Runs every `(config, seed)` pair in parallel; records come back ordered by
/// config, then seed.
pub fn run_experiment(configs: &[GenSpec], seeds: &[u64], opts: &BenchOptions) -> Result<GapReport> {
    let jobs: Vec<GenSpec> = configs.iter().flat_map(|c| seeds.iter().map(move |&s| c.with_seed(s))).collect();
    let results: Vec<Result<InstanceRecord>> = jobs.par_iter().map(|spec| run_instance(spec, opts)).collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    Ok(GapReport { methods: opts.methods.clone(), records })
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    family: String,
    config: String,
    seed: u64,
    method: &'static str,
    status: &'a str,
    value: Option<f64>,
    exact: Option<f64>,
    exact_status: &'static str,
    gap: Option<f64>,
    abs_diff: Option<f64>,
    rows: Option<usize>,
    cols: Option<usize>,
    groups: Option<usize>,
    cuts_clique_y: usize,
    cuts_oddcycle_y: usize,
    cuts_antihole_y: usize,
    cuts_lifted_stable: usize,
    cuts_clique_q: usize,
    cuts_clique_v: usize,
    cuts_bqp: usize,
    bqp_rounds: Option<usize>,
    bqp_stop: Option<StopReason>,
}

/// One row per (config, seed, method). Wall times are left out so reruns
/// produce identical bytes; see [`write_markdown`] for timings.
pub fn write_csv<W: Write>(report: &GapReport, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for rec in &report.records {
        for run in &rec.runs {
            let value = run.value();
            let (gap_rel, abs_diff) = match rec.gap(run.method()) {
                Some(Gap::Relative(g)) => (Some(g), value.zip(rec.proved()).map(|(v, e)| (v - e).abs())),
                Some(Gap::Undefined(d)) => (None, Some(d)),
                None => (None, None),
            };
            let done = match run {
                RunOutcome::Done(r) => Some(r),
                RunOutcome::Failed { .. } => None,
            };
            let count = |f: CutFamily| done.and_then(|r| r.cut_counts.get(&f).copied()).unwrap_or(0);
            let status = match done {
                Some(r) => r.status.as_str(),
                None => "ERROR",
            };
            wtr.serialize(CsvRow {
                family: rec.spec.family().to_string(),
                config: rec.spec.config_label(),
                seed: rec.spec.seed(),
                method: run.method().label(),
                status,
                value,
                exact: rec.proved(),
                exact_status: rec.exact_label(),
                gap: gap_rel,
                abs_diff,
                rows: done.map(|r| r.rows),
                cols: done.map(|r| r.cols),
                groups: done.map(|r| r.groups),
                cuts_clique_y: count(CutFamily::CliqueY),
                cuts_oddcycle_y: count(CutFamily::OddcycleY),
                cuts_antihole_y: count(CutFamily::AntiholeY),
                cuts_lifted_stable: count(CutFamily::LiftedStable),
                cuts_clique_q: count(CutFamily::CliqueQ),
                cuts_clique_v: count(CutFamily::CliqueV),
                cuts_bqp: count(CutFamily::BqpOddcycle),
                bqp_rounds: done.and_then(|r| r.bqp.as_ref()).map(|b| b.rounds),
                bqp_stop: done.and_then(|r| r.bqp.as_ref()).map(|b| b.stop),
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |g| format!("{:.2}", 100.0 * g))
}

/// Per-family tables of mean gaps (%) and mean wall times (ms).
pub fn write_markdown<W: Write>(report: &GapReport, mut w: W) -> Result<()> {
    let groups = report.by_config();
    let mut families: Vec<Family> = groups.iter().map(|(s, _)| s.family()).collect();
    families.dedup();
    for fam in families {
        let rows: Vec<_> = groups.iter().filter(|(s, _)| s.family() == fam).collect();
        writeln!(w, "## {fam}\n")?;
        writeln!(w, "Optimality gap (%), mean over instances with a proved optimum.\n")?;
        write!(w, "| config | solved |")?;
        for m in &report.methods {
            write!(w, " {m} |")?;
        }
        writeln!(w)?;
        writeln!(w, "|---|---|{}", "---|".repeat(report.methods.len()))?;
        for (spec, recs) in &rows {
            let solved = recs.iter().filter(|r| r.proved().is_some()).count();
            write!(w, "| {} | {}/{} |", spec.config_label(), solved, recs.len())?;
            for &m in &report.methods {
                write!(w, " {} |", pct(GapReport::mean_gap(recs, m).0))?;
            }
            writeln!(w)?;
        }
        writeln!(w, "\nMean wall time (ms).\n")?;
        write!(w, "| config | exact |")?;
        for m in &report.methods {
            write!(w, " {m} |")?;
        }
        writeln!(w)?;
        writeln!(w, "|---|---|{}", "---|".repeat(report.methods.len()))?;
        for (spec, recs) in &rows {
            let ms = |d: Duration| d.as_secs_f64() * 1e3;
            let n = recs.len() as f64;
            write!(w, "| {} | {:.1} |", spec.config_label(), recs.iter().map(|r| ms(r.exact_wall)).sum::<f64>() / n)?;
            for &m in &report.methods {
                let times: Vec<f64> = recs
                    .iter()
                    .filter_map(|r| match r.run(m) {
                        Some(RunOutcome::Done(run)) => Some(ms(run.wall)),
                        _ => None,
                    })
                    .collect();
                if times.is_empty() {
                    write!(w, " n/a |")?;
                } else {
                    write!(w, " {:.1} |", times.iter().sum::<f64>() / times.len() as f64)?;
                }
            }
            writeln!(w)?;
        }
        let differing: Vec<_> = rows
            .iter()
            .flat_map(|(_, recs)| recs.iter())
            .filter(|r| match (r.singleton_value, r.value(Method::ErVc)) {
                (Some(a), Some(b)) => (a - b).abs() > CHAIN_TOL * a.abs().max(1.0),
                _ => false,
            })
            .collect();
        if !differing.is_empty() {
            writeln!(w, "\nSingleton-cover relaxation differs from ER-vc on:\n")?;
            for r in differing {
                writeln!(
                    w,
                    "- {} seed {}: singletons {}, ER-vc {}",
                    r.spec.config_label(),
                    r.spec.seed(),
                    r.singleton_value.unwrap_or(f64::NAN),
                    r.value(Method::ErVc).unwrap_or(f64::NAN)
                )?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Configurations that finish in minutes on one core.
pub fn default_presets() -> Vec<GenSpec> {
    let mut out = Vec::new();
    for rho in [0.2, 0.4, 0.6] {
        out.push(GenSpec::tpesc(5, 5, rho, 0));
    }
    for rho in [0.05, 0.1, 0.35, 0.6] {
        out.push(GenSpec::cmkpc(20, 5, rho, 0));
    }
    out.push(GenSpec::one_regular(6, 10, 10, 0));
    out
}

/// The sizes of the original study. Their ER-ee models have tens of
/// thousands of columns and take hours.
pub fn large_presets() -> Vec<GenSpec> {
    let mut out = Vec::new();
    for rho in [0.2, 0.4, 0.6] {
        out.push(GenSpec::tpesc(10, 10, rho, 0));
    }
    for rho in [0.04, 0.1, 0.2] {
        out.push(GenSpec::tpesc(30, 10, rho, 0));
    }
    for rho in [0.04, 0.08, 0.12] {
        out.push(GenSpec::tpesc(50, 5, rho, 0));
    }
    for rho in [0.05, 0.1, 0.15, 0.2, 0.35, 0.6] {
        out.push(GenSpec::cmkpc(60, 4, rho, 0));
    }
    for rho in [0.05, 0.1, 0.15, 0.2] {
        out.push(GenSpec::cmkpc(100, 2, rho, 0));
    }
    out.push(GenSpec::one_regular(20, 10, 5, 0));
    out.push(GenSpec::one_regular(20, 20, 20, 0));
    out
}
