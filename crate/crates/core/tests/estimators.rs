//! Estimator-versus-oracle checks: the Monte Carlo paths are validated
//! against exhaustive enumeration on instances small enough to enumerate.

use imstab::diffusion::{
    draw_tape, estimate_difference, estimate_spread, exact_difference, exact_spread,
    simulate_rounds, EstimatorConfig,
};
use imstab::graph::{build_graph, uniform_params, Model, NodeId, ParamVector, SeedSet};
use imstab::netgen::random_gnp;
use imstab::rng::RandomStream;
use imstab::verify::spread_submodularity_violations;

/// Fixed 10-edge instance used by the unbiasedness check.
fn ten_edge_instance() -> (imstab::Graph, ParamVector, SeedSet) {
    let arcs = [
        (0, 1, 1),
        (0, 2, 1),
        (1, 3, 1),
        (2, 3, 1),
        (3, 4, 1),
        (4, 5, 1),
        (5, 0, 1),
        (2, 6, 1),
        (6, 7, 1),
        (7, 3, 1),
    ];
    let (g, _) = build_graph(8, &arcs, false).unwrap();
    let values = vec![0.35, 0.6, 0.45, 0.7, 0.5, 0.3, 0.55, 0.4, 0.65, 0.25];
    let theta = ParamVector::new(&g, Model::Ic, values).unwrap();
    (g, theta, SeedSet::from_ids([0]))
}

#[test]
fn estimator_is_unbiased_over_master_seeds() {
    let (g, theta, seeds) = ten_edge_instance();
    let exact = exact_spread(&g, &theta, &seeds).unwrap();
    let runs = 50;
    let means: Vec<f64> = (0..runs)
        .map(|seed| {
            estimate_spread(&g, &theta, &seeds, &EstimatorConfig::new(2000, 1000 + seed))
                .unwrap()
                .mean
        })
        .collect();
    let grand = means.iter().sum::<f64>() / runs as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
    let se = (var / runs as f64).sqrt();
    assert!(
        (grand - exact).abs() < 4.0 * se,
        "grand mean {grand} deviates from exact {exact} by more than 4 se = {}",
        4.0 * se
    );
}

#[test]
fn single_edge_estimate_matches_the_exact_oracle() {
    let (g, _) = build_graph(2, &[(0, 1, 1)], false).unwrap();
    let theta = ParamVector::new(&g, Model::Ic, vec![0.5]).unwrap();
    let seeds = SeedSet::singleton(NodeId(0));
    let exact = exact_spread(&g, &theta, &seeds).unwrap();
    assert_eq!(exact, 1.5);
    let est = estimate_spread(&g, &theta, &seeds, &EstimatorConfig::new(10_000, 5)).unwrap();
    assert!((est.mean - exact).abs() <= 3.0 * est.stderr);
}

#[test]
fn lt_round_simulation_agrees_with_live_edge_enumeration() {
    // The LT equivalence is distributional: Monte Carlo over the explicit
    // round process must agree with the exact live-edge enumeration.
    let arcs = [(0, 1, 1), (0, 2, 1), (1, 2, 1), (2, 3, 1), (1, 3, 1)];
    let (g, _) = build_graph(4, &arcs, false).unwrap();
    let theta = ParamVector::new(&g, Model::Lt, vec![0.5, 0.3, 0.4, 0.6, 0.2]).unwrap();
    let seeds = SeedSet::singleton(NodeId(0));
    let exact = exact_spread(&g, &theta, &seeds).unwrap();

    check_lt_rounds_against_exact(&g, &theta, &seeds, exact, 99);

    // A cyclic instance exercises re-examination across rounds.
    let arcs = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 1, 1)];
    let (g, _) = build_graph(4, &arcs, false).unwrap();
    let theta = ParamVector::new(&g, Model::Lt, vec![0.6, 0.5, 0.4, 0.3, 0.2]).unwrap();
    let seeds = SeedSet::from_ids([0]);
    let exact = exact_spread(&g, &theta, &seeds).unwrap();
    check_lt_rounds_against_exact(&g, &theta, &seeds, exact, 123);
}

fn check_lt_rounds_against_exact(
    g: &imstab::Graph,
    theta: &ParamVector,
    seeds: &SeedSet,
    exact: f64,
    master_seed: u64,
) {
    let m = 20_000u64;
    let mut sum = 0u64;
    let mut sumsq = 0u64;
    for i in 0..m {
        let tape = draw_tape(g, Model::Lt, master_seed, i);
        let trace = simulate_rounds(g, theta, seeds, &tape).unwrap();
        let c = trace.final_active().len() as u64;
        sum += c;
        sumsq += c * c;
    }
    let mean = sum as f64 / m as f64;
    let var = (sumsq as f64 - (sum as f64).powi(2) / m as f64) / (m as f64 - 1.0);
    let stderr = (var / m as f64).sqrt();
    assert!(
        (mean - exact).abs() <= 3.0 * stderr,
        "round-simulation mean {mean} vs exact {exact} (stderr {stderr})"
    );
}

/// Random bidirected instances kept inside the exact-oracle capacity.
fn small_instances(n: usize, p: f64, seeds: std::ops::Range<u64>) -> Vec<imstab::Graph> {
    let graphs: Vec<_> = seeds
        .map(|s| random_gnp(n, p, s).unwrap())
        .filter(|g| g.edge_count() >= 2 && g.edge_count() <= 20)
        .collect();
    assert!(graphs.len() >= 3, "instance pool unexpectedly thin");
    graphs
}

#[test]
fn exact_spread_is_monotone_and_submodular_on_small_instances() {
    for g in small_instances(6, 0.3, 500..510) {
        for model in [Model::Ic, Model::Lt] {
            let (theta, _) = uniform_params(&g, 0.4, model).unwrap();
            let n = g.node_count();
            let values: Vec<f64> = (0..1u32 << n)
                .map(|mask| {
                    let seeds =
                        SeedSet::from_nodes((0..n as u32).filter(|&v| mask >> v & 1 == 1).map(NodeId));
                    exact_spread(&g, &theta, &seeds).unwrap()
                })
                .collect();
            // Monotone: every marginal is nonnegative.
            for mask in 0..1u32 << n {
                for v in 0..n as u32 {
                    if mask >> v & 1 == 0 {
                        assert!(values[(mask | 1 << v) as usize] >= values[mask as usize] - 1e-9);
                    }
                }
            }
            // Submodular: the exhaustive checker finds nothing.
            assert!(spread_submodularity_violations(&g, &theta).unwrap().is_empty());
        }
    }
}

#[test]
fn difference_vanishes_on_empty_and_full_seed_sets() {
    for g in small_instances(6, 0.3, 900..910) {
        let (plus, _) = uniform_params(&g, 0.5, Model::Ic).unwrap();
        let minus = ParamVector::new(
            &g,
            Model::Ic,
            plus.values().iter().map(|v| v * 0.5).collect(),
        )
        .unwrap();
        let exact_empty = exact_difference(&g, &plus, &minus, &SeedSet::empty()).unwrap();
        let exact_full =
            exact_difference(&g, &plus, &minus, &SeedSet::full(g.node_count())).unwrap();
        assert_eq!(exact_empty, 0.0);
        assert_eq!(exact_full, 0.0);
    }
}

#[test]
fn coupled_difference_matches_exact_on_random_instances() {
    let mut stream = RandomStream::new(4242, imstab::rng::domain::FIXTURE);
    for (seed, g) in small_instances(6, 0.3, 321..331).into_iter().enumerate() {
        let seed = seed as u64;
        let values: Vec<f64> = (0..g.edge_count()).map(|_| 0.1 + 0.8 * stream.next_f64()).collect();
        let plus = ParamVector::new(&g, Model::Ic, values.clone()).unwrap();
        let minus = ParamVector::new(
            &g,
            Model::Ic,
            values.iter().map(|v| v * 0.6).collect(),
        )
        .unwrap();
        let seeds = SeedSet::from_ids([0, 1]);
        let exact = exact_difference(&g, &plus, &minus, &seeds).unwrap();
        let est =
            estimate_difference(&g, &plus, &minus, &seeds, &EstimatorConfig::new(20_000, seed))
                .unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.stderr.max(1e-9),
            "estimate {} vs exact {exact} (stderr {})",
            est.mean,
            est.stderr
        );
    }
}
