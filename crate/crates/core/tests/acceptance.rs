//! End-to-end acceptance checks. Each test prints one PASS/FAIL line to
//! stderr (uncaptured) and then asserts.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{close, generate, mixed_specs, no_better, report};
use lpcc::bench::{self, BenchOptions, BqpTrace, GapReport, InstanceRecord, Method, RunOutcome};
use lpcc::cuts::{self, CutOptions, StopReason, BQP_MAX_ROUNDS, BQP_RELATIVE_STOP};
use lpcc::exact::{self, ExactOptions, ExactStatus};
use lpcc::gen::GenSpec;
use lpcc::relax::{self, RelaxationArtifact};
use lpcc::{lp, Direction, LinearModel, Sense, SolveStatus};

/// 100 mixed instances with at most 30 y variables, every method plus the
/// singleton-cover relaxation, and how long that took.
fn corpus() -> &'static (Vec<InstanceRecord>, Duration) {
    static CORPUS: OnceLock<(Vec<InstanceRecord>, Duration)> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let start = Instant::now();
        let opts = BenchOptions { dominance: true, ..BenchOptions::default() };
        let records = mixed_specs(100, 30, 1000)
            .iter()
            .map(|s| bench::run_instance(s, &opts).expect("corpus instance runs"))
            .collect();
        (records, start.elapsed())
    })
}

const TREND_RHOS: [f64; 3] = [0.05, 0.35, 0.6];

fn cmkpc_trend() -> &'static (GapReport, Duration) {
    static TREND: OnceLock<(GapReport, Duration)> = OnceLock::new();
    TREND.get_or_init(|| {
        let start = Instant::now();
        let configs: Vec<GenSpec> = TREND_RHOS.iter().map(|&r| GenSpec::cmkpc(20, 5, r, 0)).collect();
        let seeds: Vec<u64> = (1..=10).collect();
        let rep = bench::run_experiment(&configs, &seeds, &BenchOptions::default()).expect("trend experiment runs");
        (rep, start.elapsed())
    })
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let specs = mixed_specs(50, 12, 1);
    for spec in &specs {
        let inst = generate(spec);
        let ex = exact::solve_exact(&inst, &ExactOptions::default()).unwrap();
        let oracle = exact::brute_force_oracle(&inst).unwrap();
        let same = match (ex.value, oracle) {
            (Some(a), Some(b)) => close(a, b, 1e-8),
            (None, None) => true,
            _ => false,
        };
        if ex.status != ExactStatus::Proved || !same {
            bad.push(format!("{spec:?}: branch-and-bound {:?} {:?}, oracle {oracle:?}", ex.status, ex.value));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs <= 120.0;
    report(1, "oracle equivalence", pass, &format!("{} instances, {} mismatches, {secs:.1}s", specs.len(), bad.len()));
    assert!(pass, "{bad:#?}");
}

#[test]
fn criterion_2_relaxation_validity() {
    let (records, elapsed) = corpus();
    let mut bad = Vec::new();
    let mut checked = 0;
    for rec in records {
        for run in &rec.runs {
            if let RunOutcome::Failed { method, message } = run {
                bad.push(format!("{:?}: {method} failed: {message}", rec.spec));
            }
        }
        let Some(vs) = rec.proved() else { continue };
        for m in Method::ALL {
            match rec.value(m) {
                Some(v) if no_better(rec.direction, vs, v, 1e-6) => checked += 1,
                v => bad.push(format!("{:?}: {m} = {v:?} does not bound v* = {vs}", rec.spec)),
            }
        }
    }
    let timeouts = records.iter().filter(|r| r.exact_status == ExactStatus::Timeout).count();
    let secs = elapsed.as_secs_f64();
    let pass = bad.is_empty() && secs <= 600.0;
    report(
        2,
        "relaxation validity",
        pass,
        &format!("{} instances, {checked} bounds checked, {timeouts} exact timeouts, {} violations, {secs:.1}s", records.len(), bad.len()),
    );
    assert!(pass, "{bad:#?}");
}

#[test]
fn criterion_3_singleton_cover_dominance() {
    let (records, _) = corpus();
    let mut bad = Vec::new();
    let mut checked = 0;
    for rec in records {
        let inst = generate(&rec.spec);
        if inst.edges.is_empty() {
            continue;
        }
        match (rec.singleton_value, rec.value(Method::ErEe)) {
            (Some(s), Some(e)) if no_better(rec.direction, s, e, 1e-6) => checked += 1,
            // an empty singleton relaxation dominates anything, but only if
            // it really is infeasible and not a failed solve
            (None, _) if singleton_infeasible(&inst) => checked += 1,
            (s, e) => bad.push(format!("{:?}: singleton cover {s:?}, edge relaxation {e:?}", rec.spec)),
        }
    }
    let pass = bad.is_empty() && checked > 0;
    report(3, "singleton-cover dominance over ER-ee", pass, &format!("{checked} instances with edges, {} violations", bad.len()));
    assert!(pass, "{bad:#?}");
}

fn singleton_infeasible(inst: &lpcc::LpccInstance) -> bool {
    let art = relax::build_singleton_cover_relaxation(inst).unwrap();
    lp::solve(&art.model).unwrap().status == SolveStatus::Infeasible
}

/// Every row and bound of `model` at `cols`, within `tol`.
fn satisfied(model: &LinearModel, cols: &[f64], tol: f64) -> Result<(), String> {
    match model.max_violation(cols) {
        (v, Some(what)) if v > tol => Err(format!("{what} violated by {v:.3e}")),
        _ => Ok(()),
    }
}

#[test]
fn criterion_4_lift_feasibility() {
    let mut points = 0;
    let mut bad = Vec::new();
    let mut families = std::collections::BTreeSet::new();
    for spec in mixed_specs(400, 12, 5000) {
        if points >= 200 {
            break;
        }
        let inst = generate(&spec);
        if inst.edges.is_empty() {
            continue;
        }
        let ex = exact::solve_exact(&inst, &ExactOptions { collect_leaves: true, ..ExactOptions::default() }).unwrap();
        if ex.leaves.is_empty() {
            continue;
        }
        let g = inst.conflict_graph().unwrap();
        let edge = relax::build_edge_relaxation(&inst).unwrap();
        let cover = relax::build_default_cover_relaxation(&inst).unwrap();
        let partition = cover.partition.clone().unwrap();
        let static_cuts = cuts::static_cuts(&g, &partition, &CutOptions::default());
        let with_cuts = cuts::apply_cuts(&cover, &static_cuts).unwrap();
        let looped: RelaxationArtifact = cuts::iterate_bqp_separation(&with_cuts).unwrap().artifact;
        families.extend(looped.cut_counts.iter().filter(|(_, &c)| c > 0).map(|(f, _)| *f));
        for p in ex.leaves.iter().take(200 - points) {
            points += 1;
            for (name, art) in [("ER-ee", &edge), ("ER-vc with cuts", &looped)] {
                if let Err(e) = satisfied(&art.model, &art.lift(&p.x, &p.y), 1e-8) {
                    bad.push(format!("{spec:?}: lift into {name}: {e}"));
                }
            }
            let lifted = cover.lift(&p.x, &p.y);
            for cut in &static_cuts {
                let v = cut.violation(|k| cover.value(&lifted, k).unwrap());
                if v > 1e-8 {
                    bad.push(format!("{spec:?}: {:?} cut {} violated by {v:.3e}", cut.family, cut.provenance));
                }
            }
        }
    }
    let fams: Vec<String> = families.iter().map(|f| format!("{f:?}")).collect();
    let pass = bad.is_empty() && points >= 200;
    report(4, "lift feasibility", pass, &format!("{points} points, cut families seen: {}, {} violations", fams.join(" "), bad.len()));
    assert!(pass, "{bad:#?}");
}

#[test]
fn criterion_5_cmkpc_trend() {
    let (rep, elapsed) = cmkpc_trend();
    let groups = rep.by_config();
    let means = |m: Method| -> Vec<f64> {
        groups.iter().map(|(_, recs)| GapReport::mean_gap(recs, m).0.unwrap_or(f64::NAN)).collect()
    };
    let (lp_m, vc_m, cuts_m) = (means(Method::Lp), means(Method::ErVc), means(Method::ErVcCuts));
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
    let secs = elapsed.as_secs_f64();
    let pass = increasing(&lp_m)
        && increasing(&vc_m)
        && cuts_m.iter().all(|&g| g <= 0.02)
        && rep.is_clean()
        && secs <= 1800.0;
    let pct = |v: &[f64]| v.iter().map(|g| format!("{:.2}", 100.0 * g)).collect::<Vec<_>>().join("/");
    report(
        5,
        "CMKPC (20,5) gap trend",
        pass,
        &format!("rho 0.05/0.35/0.6 mean gaps %: LP {} ER-vc {} ER-vc-cuts {}, {secs:.1}s", pct(&lp_m), pct(&vc_m), pct(&cuts_m)),
    );
    assert!(pass, "{:#?}", rep.failures().collect::<Vec<_>>());
}

#[test]
fn criterion_6_one_regular_trend() {
    let start = Instant::now();
    let opts = BenchOptions { methods: vec![Method::Lp, Method::ErEe, Method::ErVc], ..BenchOptions::default() };
    let seeds: Vec<u64> = (1..=25).collect();
    let rep = bench::run_experiment(&[GenSpec::one_regular(6, 10, 10, 0)], &seeds, &opts).unwrap();
    let recs: Vec<&InstanceRecord> = rep.records.iter().collect();
    let (lp_gap, _) = GapReport::mean_gap(&recs, Method::Lp);
    let (vc_gap, n) = GapReport::mean_gap(&recs, Method::ErVc);
    let unequal: Vec<String> = recs
        .iter()
        .filter(|r| match (r.value(Method::ErVc), r.value(Method::ErEe)) {
            (Some(a), Some(b)) => !close(a, b, 1e-6),
            _ => true,
        })
        .map(|r| format!("seed {}", r.spec.seed()))
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let (lp_gap, vc_gap) = (lp_gap.unwrap_or(f64::NAN), vc_gap.unwrap_or(f64::NAN));
    let pass = lp_gap >= 0.15 && vc_gap <= 0.03 && unequal.is_empty() && rep.is_clean() && secs <= 600.0;
    report(
        6,
        "1R (6,10,10) gaps",
        pass,
        &format!(
            "mean gaps over {n} seeds: LP {:.2}% ER-vc {:.2}%, ER-vc != ER-ee on {} instances, {secs:.1}s",
            100.0 * lp_gap,
            100.0 * vc_gap,
            unequal.len()
        ),
    );
    assert!(pass, "{unequal:?} {:#?}", rep.failures().collect::<Vec<_>>());
}

fn trace_problems(dir: Direction, t: &BqpTrace) -> Vec<String> {
    let mut out = Vec::new();
    let v = &t.values;
    if t.rounds > BQP_MAX_ROUNDS || v.len() > BQP_MAX_ROUNDS {
        out.push(format!("{} solves", t.rounds));
    }
    for (k, w) in v.windows(2).enumerate() {
        if dir.score(w[1]) > dir.score(w[0]) + 1e-7 * w[0].abs().max(1.0) {
            out.push(format!("value moved from {} to {}", w[0], w[1]));
        }
        let small = (w[0] - w[1]).abs() < BQP_RELATIVE_STOP * w[1].abs();
        if small && k + 2 < v.len() {
            out.push(format!("continued after a change below 1% at solve {}", k + 2));
        }
    }
    match t.stop {
        StopReason::SmallImprovement => {
            let ok = matches!(v[..], [.., a, b] if (a - b).abs() < BQP_RELATIVE_STOP * b.abs());
            if !ok {
                out.push("stopped for a small change that was not small".into());
            }
        }
        StopReason::RoundLimit if t.rounds != BQP_MAX_ROUNDS => out.push("round limit before five solves".into()),
        StopReason::NotOptimal => out.push("a solve was not optimal".into()),
        _ => {}
    }
    out
}

#[test]
fn criterion_7_bqp_loop_contract() {
    let (records, _) = corpus();
    let (trend, _) = cmkpc_trend();
    let mut traces = 0;
    let mut bad = Vec::new();
    for rec in records.iter().chain(&trend.records) {
        if let Some(RunOutcome::Done(run)) = rec.run(Method::ErVcCuts) {
            let t = run.bqp.as_ref().expect("ER-vc-cuts runs carry a loop trace");
            traces += 1;
            let empty = rec.exact_status == ExactStatus::Proved && rec.exact.is_none();
            if empty && run.status == SolveStatus::Infeasible && t.stop == StopReason::NotOptimal && t.values.is_empty() {
                // nothing to iterate on; the relaxation itself is empty
                continue;
            }
            bad.extend(trace_problems(rec.direction, t).into_iter().map(|p| format!("{:?}: {p}", rec.spec)));
        }
    }
    let pass = bad.is_empty() && traces > 0;
    report(7, "BQP loop contract", pass, &format!("{traces} loop traces, {} violations", bad.len()));
    assert!(pass, "{bad:#?}");
}

#[test]
fn criterion_8_simplex_suite() {
    let (infeasible, mut bad) = common::oracle::random_lp_mismatches(300, 8);

    let mut m = LinearModel::new(Direction::Max);
    let x = m.add_variable("x", 0.0, 1.0).unwrap();
    m.add_constraint(vec![(x, 1.0)], Sense::Ge, 2.0).unwrap();
    if lp::solve(&m).unwrap().status != SolveStatus::Infeasible {
        bad.push("x in [0,1], x >= 2 not reported infeasible".into());
    }
    let mut m = LinearModel::new(Direction::Max);
    let x = m.add_variable("x", 0.0, f64::INFINITY).unwrap();
    let y = m.add_variable("y", 0.0, f64::INFINITY).unwrap();
    m.set_objective(y, 1.0);
    m.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Ge, -1.0).unwrap();
    if lp::solve(&m).unwrap().status != SolveStatus::Unbounded {
        bad.push("max y, y <= x + 1, x >= 0 not reported unbounded".into());
    }
    let pass = bad.is_empty();
    report(8, "simplex vs vertex enumeration", pass, &format!("300 random LPs ({infeasible} infeasible) + 2 status cases, {} mismatches", bad.len()));
    assert!(pass, "{bad:#?}");
}

#[test]
fn criterion_9_determinism() {
    let configs = [GenSpec::tpesc(4, 4, 0.5, 0), GenSpec::cmkpc(12, 3, 0.3, 0), GenSpec::one_regular(4, 3, 3, 0)];
    let seeds = [1, 2, 3];
    let csv = || {
        let rep = bench::run_experiment(&configs, &seeds, &BenchOptions::default()).unwrap();
        let mut out = Vec::new();
        bench::write_csv(&rep, &mut out).unwrap();
        out
    };
    let (a, b) = (csv(), csv());
    let library_same = a == b && !a.is_empty();

    let dir = tempfile::tempdir().unwrap();
    let cli = |tag: &str| {
        let path = dir.path().join(format!("{tag}.csv"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_lpcc"))
            .args(["bench", "--family", "cmkpc", "--n", "10", "--m", "3", "--rho", "0.3", "--seeds", "3"])
            .arg("--csv")
            .arg(&path)
            .arg("--md")
            .arg(dir.path().join(format!("{tag}.md")))
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (c, d) = (cli("first"), cli("second"));
    let cli_same = c == d && !c.is_empty();
    let pass = library_same && cli_same;
    report(
        9,
        "determinism",
        pass,
        &format!("library CSV {} bytes identical: {library_same}; CLI CSV {} bytes identical: {cli_same}", a.len(), c.len()),
    );
    assert!(pass);
}
