//! Property tests over seeded instances and random graphs.

mod common;

use common::{close, generate, no_better};
use lpcc::cuts::{self, CutOptions};
use lpcc::exact::{self, ExactOptions, ExactStatus};
use lpcc::gen::GenSpec;
use lpcc::graph::{approx_min_vertex_cover, erdos_renyi, feasible_cover_partition, maximal_cliques};
use lpcc::relax::{self, RelaxationArtifact};
use lpcc::{lp, ConflictGraph, Direction, LpccInstance};
use proptest::prelude::*;

fn small_spec() -> impl Strategy<Value = GenSpec> {
    prop_oneof![
        (2usize..=4, 2usize..=3, 0.0f64..=1.0, any::<u64>()).prop_map(|(s, d, r, seed)| GenSpec::tpesc(s, d, r, seed)),
        (3usize..=12, 1usize..=3, 0.0f64..=0.6, any::<u64>()).prop_map(|(n, m, r, seed)| GenSpec::cmkpc(n, m, r, seed)),
        (1usize..=6, 1usize..=3, 1usize..=3, any::<u64>()).prop_map(|(n, p, m, seed)| GenSpec::one_regular(n, p, m, seed)),
    ]
}

fn value(art: &RelaxationArtifact) -> Option<f64> {
    lp::solve(&art.model).unwrap().value
}

fn brute_min_cover(g: &ConflictGraph) -> usize {
    let n = g.num_nodes();
    (0u32..1 << n)
        .filter(|mask| {
            let nodes: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            g.is_vertex_cover(&nodes)
        })
        .map(u32::count_ones)
        .min()
        .unwrap() as usize
}

fn brute_max_weight_stable(g: &ConflictGraph, w: &[f64]) -> f64 {
    let n = g.num_nodes();
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| g.is_stable(s))
        .map(|s| s.iter().map(|&i| w[i]).sum::<f64>())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generation_is_deterministic_and_valid(spec in small_spec()) {
        let a = generate(&spec);
        let b = generate(&spec);
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        prop_assert!(a.validate().is_empty(), "{:?}", a.validate());
        prop_assert_eq!(LpccInstance::from_json(&a.to_json().unwrap()).unwrap(), a);
    }

    #[test]
    fn one_regular_graphs_have_n_edges(n in 1usize..=20, p in 1usize..=4, m in 1usize..=4, seed in any::<u64>()) {
        let inst = generate(&GenSpec::one_regular(n, p, m, seed));
        let g = inst.conflict_graph().unwrap();
        prop_assert_eq!(g.num_edges(), n);
        prop_assert!((0..g.num_nodes()).all(|i| g.degree(i) == 1));
    }

    #[test]
    fn normalize_keeps_the_optimum(spec in small_spec(), scales in prop::collection::vec(0.25f64..4.0, 40)) {
        // stretch every y column, then check that normalizing undoes it
        let base = generate(&spec);
        let mut inst = base.clone();
        for j in 0..inst.num_y {
            let s = scales[j % scales.len()];
            inst.y_upper[j] *= s;
            inst.objective_y[j] /= s;
            for row in &mut inst.rows {
                row.cy[j] /= s;
            }
        }
        let norm = inst.normalize().unwrap();
        prop_assert_eq!(norm.normalize().unwrap(), norm.clone());
        let lp_val = |i: &LpccInstance| value(&relax::build_lp_relaxation(i).unwrap());
        match (lp_val(&inst), lp_val(&norm)) {
            (Some(a), Some(b)) => prop_assert!(close(a, b, 1e-6), "{} vs {}", a, b),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
        let ex = |i: &LpccInstance| exact::solve_exact(i, &ExactOptions::default()).unwrap();
        let (a, b) = (ex(&inst), ex(&norm));
        if a.status == ExactStatus::Proved && b.status == ExactStatus::Proved {
            match (a.value, b.value) {
                (Some(a), Some(b)) => prop_assert!(close(a, b, 1e-6), "{} vs {}", a, b),
                (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
            }
        }
    }

    #[test]
    fn maximal_cliques_are_maximal_cliques(n in 1usize..=12, rho in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = erdos_renyi(n, rho, seed);
        let list = maximal_cliques(&g);
        prop_assert!(!list.truncated);
        for c in &list.cliques {
            prop_assert!(g.is_clique(c));
            let extendable = (0..n).any(|v| !c.contains(&v) && c.iter().all(|&u| g.has_edge(u, v)));
            prop_assert!(!extendable, "{:?} is not maximal", c);
        }
    }

    #[test]
    fn cover_is_a_two_approximation(n in 1usize..=12, rho in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = erdos_renyi(n, rho, seed);
        let cover = approx_min_vertex_cover(&g);
        prop_assert!(g.is_vertex_cover(&cover));
        prop_assert!(cover.len() <= 2 * brute_min_cover(&g));
    }

    #[test]
    fn cover_partition_groups_are_stable(n in 1usize..=14, rho in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = erdos_renyi(n, rho, seed);
        let cover = approx_min_vertex_cover(&g);
        let p = feasible_cover_partition(&g, &cover).unwrap();
        let mut union: Vec<usize> = p.groups().concat();
        union.sort_unstable();
        let mut sorted = cover.clone();
        sorted.sort_unstable();
        prop_assert_eq!(union, sorted);
        for group in p.groups() {
            prop_assert!(g.is_stable(group));
        }
        for i in 0..n {
            prop_assert_eq!(g.degree(i), g.neighbors(i).len());
            prop_assert!(g.neighbors(i).iter().all(|&j| j != i && g.has_edge(j, i)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn relaxations_bound_the_exact_value(spec in small_spec()) {
        let inst = generate(&spec);
        let ex = exact::solve_exact(&inst, &ExactOptions::default()).unwrap();
        prop_assert_eq!(ex.status, ExactStatus::Proved);
        match (ex.value, exact::brute_force_oracle(&inst).unwrap()) {
            (Some(a), Some(b)) => prop_assert!(close(a, b, 1e-8), "{} vs oracle {}", a, b),
            (a, b) => prop_assert_eq!(a, b),
        }
        let Some(vs) = ex.value else { return Ok(()) };
        let p = ex.point.as_ref().unwrap();
        prop_assert!(inst.evaluate(&p.x, &p.y).unwrap().is_feasible());

        let dir = inst.direction;
        let lp_v = value(&relax::build_lp_relaxation(&inst).unwrap()).unwrap();
        let ee = value(&relax::build_edge_relaxation(&inst).unwrap()).unwrap();
        let cover = relax::build_default_cover_relaxation(&inst).unwrap();
        let vc = value(&cover).unwrap();
        for v in [lp_v, ee, vc] {
            prop_assert!(no_better(dir, vs, v, 1e-6), "{} does not bound {}", v, vs);
        }
        prop_assert!(no_better(dir, ee, lp_v, 1e-6));
        if !inst.edges.is_empty() {
            let single = value(&relax::build_singleton_cover_relaxation(&inst).unwrap()).unwrap();
            prop_assert!(no_better(dir, single, ee, 1e-6), "singletons {} vs edge {}", single, ee);
        }

        // cuts only tighten
        let g = inst.conflict_graph().unwrap();
        let partition = cover.partition.clone().unwrap();
        let with_cuts = cuts::apply_cuts(&cover, &cuts::static_cuts(&g, &partition, &CutOptions::default())).unwrap();
        let vcuts = value(&with_cuts).unwrap();
        prop_assert!(no_better(dir, vcuts, vc, 1e-6) && no_better(dir, vs, vcuts, 1e-6));
        let looped = cuts::iterate_bqp_separation(&with_cuts).unwrap();
        let last = looped.result.value.unwrap();
        prop_assert!(no_better(dir, last, vcuts, 1e-6) && no_better(dir, vs, last, 1e-6));
    }

    #[test]
    fn one_regular_cover_matches_edge_relaxation(n in 1usize..=6, p in 1usize..=4, m in 1usize..=4, seed in any::<u64>()) {
        let inst = generate(&GenSpec::one_regular(n, p, m, seed));
        let ee = value(&relax::build_edge_relaxation(&inst).unwrap());
        let vc = value(&relax::build_default_cover_relaxation(&inst).unwrap());
        match (ee, vc) {
            (Some(a), Some(b)) => prop_assert!(close(a, b, 1e-6), "{} vs {}", a, b),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn stable_set_cuts_respect_the_stable_set_bound(
        n in 2usize..=14,
        rho in 0.1f64..=0.9,
        seed in any::<u64>(),
        weights in prop::collection::vec(0.0f64..10.0, 14),
    ) {
        // no rows: the LPCC optimum is a maximum weight stable set
        let g = erdos_renyi(n, rho, seed);
        let mut inst = LpccInstance::new(Direction::Max, 0, n);
        inst.objective_y = weights[..n].to_vec();
        inst.edges = g.edges();
        let best = brute_max_weight_stable(&g, &inst.objective_y);
        let cover = relax::build_default_cover_relaxation(&inst).unwrap();
        let partition = cover.partition.clone().unwrap();
        let cuts = cuts::stable_set_cuts(&g, &partition, &CutOptions::default());
        let val = value(&cuts::apply_cuts(&cover, &cuts).unwrap()).unwrap();
        prop_assert!(val >= best - 1e-6 * best.max(1.0), "{} below stable set optimum {}", val, best);
        let ex = exact::solve_exact(&inst, &ExactOptions::default()).unwrap();
        prop_assert!(close(ex.value.unwrap(), best, 1e-8));
    }

    #[test]
    fn lp_solves_are_deterministic(spec in small_spec()) {
        let art = relax::build_default_cover_relaxation(&generate(&spec)).unwrap();
        let a = lp::solve(&art.model).unwrap();
        let b = lp::solve(&art.model).unwrap();
        prop_assert_eq!(a.x, b.x);
        prop_assert_eq!(a.value, b.value);
    }
}
