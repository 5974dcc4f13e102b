//! Property tests for the structural invariants: graph bookkeeping,
//! serialization round trips, parameter repairs, tape determinism, and the
//! coupling containments that the difference estimator relies on.

use proptest::prelude::*;

use imstab::diffusion::{draw_tape, reach, realize_ic, realize_lt, simulate_rounds};
use imstab::graph::{
    build_graph, load_edge_list_str, uniform_params, Model, NodeId, ParamVector, SeedSet,
    LT_SUM_SLACK,
};
use imstab::uncertainty::{contains, extreme_params, relative_intervals, Direction};
use imstab::Graph;

fn arcs_strategy(n: u32) -> impl Strategy<Value = Vec<(u32, u32, u32)>> {
    prop::collection::vec((0..n, 0..n, 1u32..4), 0..24)
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1u32..12)
        .prop_flat_map(|n| (Just(n), arcs_strategy(n), any::<bool>()))
        .prop_map(|(n, arcs, undirected)| build_graph(n as usize, &arcs, undirected).unwrap().0)
}

fn seeds_strategy(n: usize) -> impl Strategy<Value = SeedSet> {
    prop::collection::vec(0..n as u32, 0..=n).prop_map(SeedSet::from_ids)
}

proptest! {
    #[test]
    fn adjacency_sums_match_edge_count(g in graph_strategy()) {
        let out: usize = g.nodes().map(|v| g.out_edges(v).len()).sum();
        let inn: usize = g.nodes().map(|v| g.in_edges(v).len()).sum();
        prop_assert_eq!(out, g.edge_count());
        prop_assert_eq!(inn, g.edge_count());
        // Edge ids are dense and sorted by (src, dst).
        for (i, e) in g.edges().iter().enumerate() {
            prop_assert_eq!(e.id.index(), i);
            if i > 0 {
                let prev = &g.edges()[i - 1];
                prop_assert!((prev.src, prev.dst) < (e.src, e.dst));
            }
            prop_assert!(e.src != e.dst);
        }
    }

    #[test]
    fn dump_then_load_round_trips(g in graph_strategy()) {
        let dumped = g.dump_to_string();
        let (reloaded, _) = load_edge_list_str(&dumped, false).unwrap();
        prop_assert_eq!(g, reloaded);
    }

    #[test]
    fn uniform_params_always_satisfies_invariants(
        g in graph_strategy(),
        p in 0.0f64..=1.0,
        lt in any::<bool>(),
    ) {
        let model = if lt { Model::Lt } else { Model::Ic };
        let (theta, _) = uniform_params(&g, p, model).unwrap();
        for &v in theta.values() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if model == Model::Lt {
            for v in g.nodes() {
                prop_assert!(theta.in_sum(&g, v) <= 1.0 + LT_SUM_SLACK);
            }
        }
    }

    #[test]
    fn tapes_are_deterministic_and_in_range(
        g in graph_strategy(),
        seed in any::<u64>(),
        index in 0u64..1000,
        lt in any::<bool>(),
    ) {
        let model = if lt { Model::Lt } else { Model::Ic };
        let tape = draw_tape(&g, model, seed, index);
        prop_assert_eq!(&tape, &draw_tape(&g, model, seed, index));
        for &v in tape.values() {
            prop_assert!((0.0..1.0).contains(&v));
        }
        let expected = match model {
            Model::Ic => g.edge_count(),
            Model::Lt => g.node_count(),
        };
        prop_assert_eq!(tape.values().len(), expected);
    }

    #[test]
    fn ic_coupling_containment(
        g in graph_strategy(),
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        factor in 0.0f64..=1.0,
        sample in 0u64..50,
    ) {
        let (plus, _) = uniform_params(&g, p, Model::Ic).unwrap();
        let minus = ParamVector::new(
            &g,
            Model::Ic,
            plus.values().iter().map(|&v| v * factor).collect(),
        ).unwrap();
        let tape = draw_tape(&g, Model::Ic, seed, sample);
        let hi = realize_ic(&tape, &plus).unwrap();
        let lo = realize_ic(&tape, &minus).unwrap();
        for e in g.edges() {
            prop_assert!(!lo.is_live(e.id) || hi.is_live(e.id));
        }
        let seeds = SeedSet::from_ids(0..(g.node_count() as u32).min(3));
        let reach_hi = reach(&g, &hi, &seeds).unwrap();
        let reach_lo = reach(&g, &lo, &seeds).unwrap();
        prop_assert!(reach_lo.is_subset(&reach_hi));
    }

    #[test]
    fn lt_coupling_containment_and_single_live_in_edge(
        g in graph_strategy(),
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        factor in 0.0f64..=1.0,
        sample in 0u64..50,
    ) {
        let (plus, _) = uniform_params(&g, p, Model::Lt).unwrap();
        let minus = ParamVector::new(
            &g,
            Model::Lt,
            plus.values().iter().map(|&v| v * factor).collect(),
        ).unwrap();
        let tape = draw_tape(&g, Model::Lt, seed, sample);
        let hi = realize_lt(&g, &tape, &plus, &plus).unwrap();
        let lo = realize_lt(&g, &tape, &minus, &plus).unwrap();
        for e in g.edges() {
            prop_assert!(!lo.is_live(e.id) || hi.is_live(e.id));
        }
        for v in g.nodes() {
            for live in [&hi, &lo] {
                let live_in = g.in_edges(v).iter().filter(|&&e| live.is_live(e)).count();
                prop_assert!(live_in <= 1);
            }
        }
    }

    #[test]
    fn reach_is_monotone_in_the_seed_set(
        g in graph_strategy(),
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        sample in 0u64..50,
    ) {
        let (theta, _) = uniform_params(&g, p, Model::Ic).unwrap();
        let tape = draw_tape(&g, Model::Ic, seed, sample);
        let live = realize_ic(&tape, &theta).unwrap();
        let n = g.node_count() as u32;
        let small = SeedSet::from_ids((0..n).filter(|v| v % 3 == 0));
        let large = SeedSet::from_nodes(small.iter().chain((0..n).filter(|v| v % 3 == 1).map(NodeId)));
        let reach_small = reach(&g, &live, &small).unwrap();
        let reach_large = reach(&g, &live, &large).unwrap();
        prop_assert!(reach_small.is_subset(&reach_large));
    }

    #[test]
    fn interval_extremes_dominate_and_are_contained(
        g in graph_strategy(),
        p in 0.0f64..=1.0,
        delta in 0.0f64..=1.5,
        lt in any::<bool>(),
    ) {
        let model = if lt { Model::Lt } else { Model::Ic };
        let (theta, _) = uniform_params(&g, p, model).unwrap();
        let (u, _) = relative_intervals(&g, &theta, delta).unwrap();
        let plus = extreme_params(&g, &u, Direction::Upper);
        let minus = extreme_params(&g, &u, Direction::Lower);
        prop_assert!(minus.dominated_by(&plus, 0.0));
        prop_assert!(contains(&u, &plus).unwrap());
        prop_assert!(contains(&u, &minus).unwrap());
        if delta == 0.0 {
            prop_assert_eq!(plus.values(), theta.values());
            prop_assert_eq!(minus.values(), theta.values());
        }
    }

    #[test]
    fn seed_sets_validate_against_the_graph(
        g in graph_strategy(),
        seeds in seeds_strategy(16),
    ) {
        let live = realize_ic(
            &draw_tape(&g, Model::Ic, 1, 0),
            &uniform_params(&g, 0.5, Model::Ic).unwrap().0,
        ).unwrap();
        let result = reach(&g, &live, &seeds);
        let in_range = seeds.iter().all(|v| v.index() < g.node_count());
        prop_assert_eq!(result.is_ok(), in_range);
    }

    #[test]
    fn traces_grow_monotonically_and_quiesce_in_time(
        g in graph_strategy(),
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        sample in 0u64..20,
        lt in any::<bool>(),
    ) {
        let model = if lt { Model::Lt } else { Model::Ic };
        let (theta, _) = uniform_params(&g, p, model).unwrap();
        let tape = draw_tape(&g, model, seed, sample);
        let seeds = SeedSet::from_ids((0..g.node_count() as u32).filter(|v| v % 2 == 0));
        let trace = simulate_rounds(&g, &theta, &seeds, &tape).unwrap();
        prop_assert_eq!(trace.tau + 1, trace.rounds.len());
        prop_assert!(trace.tau <= g.node_count());
        prop_assert_eq!(&trace.rounds[0], &seeds);
        for w in trace.rounds.windows(2) {
            // Each round strictly extends the previous one.
            prop_assert!(w[1].len() > w[0].len());
            prop_assert!(w[0].iter().all(|v| w[1].contains(v)));
        }
        // Reruns of the same tape are identical.
        prop_assert_eq!(&trace, &simulate_rounds(&g, &theta, &seeds, &tape).unwrap());
    }
}
