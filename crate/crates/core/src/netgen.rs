//! Seedable generators for the synthetic graph families used in the
//! experiments. Every generator is a pure function of its arguments
//! including the seed: reruns are bit-identical.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{build_graph, Graph};
use crate::rng::{domain, RandomStream};

/// A generator family plus its parameters, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    Grid2d { rows: usize, cols: usize },
    RandomRegular { n: usize, degree: usize, seed: u64 },
    SmallWorld { n: usize, side: usize, beta: f64, seed: u64 },
    PrefAttach { n: usize, m: usize, seed: u64 },
    Clique { n: usize },
    TwoCliques { n: usize },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Graph> {
        match *self {
            GenSpec::Grid2d { rows, cols } => grid_2d(rows, cols),
            GenSpec::RandomRegular { n, degree, seed } => random_regular(n, degree, seed),
            GenSpec::SmallWorld { n, side, beta, seed } => watts_strogatz(n, side, beta, seed),
            GenSpec::PrefAttach { n, m, seed } => barabasi_albert(n, m, seed),
            GenSpec::Clique { n } => clique(n),
            GenSpec::TwoCliques { n } => two_cliques(n),
        }
    }

    /// Compact identifier used in report rows.
    pub fn id(&self) -> String {
        match *self {
            GenSpec::Grid2d { rows, cols } => format!("grid-{rows}x{cols}"),
            GenSpec::RandomRegular { n, degree, seed } => format!("regular-n{n}-d{degree}-s{seed}"),
            GenSpec::SmallWorld { n, side, beta, seed } => {
                format!("smallworld-n{n}-side{side}-beta{beta}-s{seed}")
            }
            GenSpec::PrefAttach { n, m, seed } => format!("prefattach-n{n}-m{m}-s{seed}"),
            GenSpec::Clique { n } => format!("clique-{n}"),
            GenSpec::TwoCliques { n } => format!("two-cliques-{n}"),
        }
    }
}

fn built(n: usize, arcs: Vec<(u32, u32, u32)>) -> Result<Graph> {
    // Generators never emit self-loops or duplicates; build_graph enforces it.
    Ok(build_graph(n, &arcs, true)?.0)
}

/// 4-neighbor lattice on `rows x cols` nodes, bidirected.
pub fn grid_2d(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(invalid("grid needs at least one row and one column"));
    }
    let id = |r: usize, c: usize| (r * cols + c) as u32;
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                arcs.push((id(r, c), id(r, c + 1), 1));
            }
            if r + 1 < rows {
                arcs.push((id(r, c), id(r + 1, c), 1));
            }
        }
    }
    built(rows * cols, arcs)
}

/// Random `d`-regular simple graph via the pairing model: repeatedly match
/// two random unpaired stubs, rejecting self-loops and duplicate edges, and
/// restart the whole matching when no legal pair remains.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if !(n * d).is_multiple_of(2) {
        return Err(invalid("random regular graph needs n*d even"));
    }
    if d >= n {
        return Err(invalid("degree must be smaller than the node count"));
    }
    if d == 0 {
        return built(n, Vec::new());
    }
    const RESTART_BUDGET: usize = 1000;
    let mut stream = RandomStream::new(seed, domain::NETGEN);
    let norm = |a: u32, b: u32| (a.min(b), a.max(b));
    'attempt: for _ in 0..RESTART_BUDGET {
        let mut stubs: Vec<u32> = (0..n as u32)
            .flat_map(|v| std::iter::repeat_n(v, d))
            .collect();
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(n * d / 2);
        let mut arcs = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut placed = false;
            for _ in 0..50 {
                let i = stream.next_below(stubs.len() as u64) as usize;
                let mut j = stream.next_below(stubs.len() as u64 - 1) as usize;
                if j >= i {
                    j += 1;
                }
                let (a, b) = (stubs[i], stubs[j]);
                if a != b && !seen.contains(&norm(a, b)) {
                    seen.insert(norm(a, b));
                    arcs.push((a, b, 1));
                    stubs.swap_remove(i.max(j));
                    stubs.swap_remove(i.min(j));
                    placed = true;
                    break;
                }
            }
            if placed {
                continue;
            }
            // Unlucky sampling or genuinely stuck: scan for any legal pair.
            let legal = (0..stubs.len()).find_map(|i| {
                (i + 1..stubs.len())
                    .find(|&j| stubs[i] != stubs[j] && !seen.contains(&norm(stubs[i], stubs[j])))
                    .map(|j| (i, j))
            });
            match legal {
                Some((i, j)) => {
                    seen.insert(norm(stubs[i], stubs[j]));
                    arcs.push((stubs[i], stubs[j], 1));
                    stubs.swap_remove(j);
                    stubs.swap_remove(i);
                }
                None => continue 'attempt,
            }
        }
        return built(n, arcs);
    }
    Err(Error::Generation(format!(
        "pairing model failed to produce a simple {d}-regular graph on {n} nodes \
         within {RESTART_BUDGET} restarts"
    )))
}

/// Watts-Strogatz small world: ring lattice with `side` neighbors on each
/// side, then each edge's far endpoint rewired with probability `beta` to a
/// uniform non-duplicate, non-self target. Rewiring is skipped when no legal
/// target exists.
pub fn watts_strogatz(n: usize, side: usize, beta: f64, seed: u64) -> Result<Graph> {
    if 2 * side >= n {
        return Err(invalid("ring lattice needs 2*side < n"));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid(format!("rewiring probability {beta} outside [0, 1]")));
    }
    let mut stream = RandomStream::new(seed, domain::NETGEN);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * side);
    let mut present: HashSet<(u32, u32)> = HashSet::with_capacity(n * side);
    let norm = |a: u32, b: u32| (a.min(b), a.max(b));
    for i in 0..n as u32 {
        for j in 1..=side as u32 {
            let t = (i + j) % n as u32;
            edges.push((i, t));
            present.insert(norm(i, t));
        }
    }
    let degree_of = |present: &HashSet<(u32, u32)>, v: u32| -> usize {
        // Only needed to detect saturated nodes; n is small enough to scan.
        (0..n as u32).filter(|&u| u != v && present.contains(&norm(u, v))).count()
    };
    for edge in edges.iter_mut() {
        if stream.next_f64() >= beta {
            continue;
        }
        let (near, far) = *edge;
        if degree_of(&present, near) == n - 1 {
            continue; // saturated, no legal target
        }
        present.remove(&norm(near, far));
        // Rejection-sample a fresh far endpoint; fall back to an ordered
        // scan if unlucky so termination never depends on chance.
        let mut target = None;
        for _ in 0..100 {
            let t = stream.next_below(n as u64) as u32;
            if t != near && !present.contains(&norm(near, t)) {
                target = Some(t);
                break;
            }
        }
        let target = target.unwrap_or_else(|| {
            let legal: Vec<u32> = (0..n as u32)
                .filter(|&t| t != near && !present.contains(&norm(near, t)))
                .collect();
            legal[stream.next_below(legal.len() as u64) as usize]
        });
        present.insert(norm(near, target));
        *edge = (near, target);
    }
    let arcs: Vec<(u32, u32, u32)> = edges.into_iter().map(|(a, b)| (a, b, 1)).collect();
    built(n, arcs)
}

/// Preferential attachment: start from a complete graph on `m + 1` nodes,
/// then attach each new node to `m` distinct existing nodes sampled
/// proportionally to degree (repeated-node-list sampling).
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || m >= n {
        return Err(invalid("preferential attachment needs 1 <= m < n"));
    }
    let mut stream = RandomStream::new(seed, domain::NETGEN);
    let mut arcs: Vec<(u32, u32, u32)> = Vec::new();
    // One entry per edge endpoint, so a node appears `degree` times.
    let mut endpoints: Vec<u32> = Vec::new();
    for i in 0..=m as u32 {
        for j in (i + 1)..=m as u32 {
            arcs.push((i, j, 1));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    for v in (m + 1)..n {
        let v = v as u32;
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        let mut rejects = 0;
        while targets.len() < m {
            let t = endpoints[stream.next_below(endpoints.len() as u64) as usize];
            if targets.contains(&t) {
                rejects += 1;
                if rejects > 1000 {
                    // Deterministic escape hatch: smallest node not yet chosen.
                    let t = (0..v).find(|c| !targets.contains(c)).expect("m < v");
                    targets.push(t);
                }
                continue;
            }
            targets.push(t);
        }
        for &t in &targets {
            arcs.push((v, t, 1));
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    built(n, arcs)
}

/// Bidirected complete graph on `n` nodes: all `n(n-1)` directed edges.
pub fn clique(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(invalid("clique needs at least 2 nodes"));
    }
    let mut arcs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            arcs.push((i, j, 1));
        }
    }
    built(n, arcs)
}

/// Two disjoint bidirected cliques of `n` nodes each: block one on nodes
/// `0..n`, block two on `n..2n`, no edges across.
pub fn two_cliques(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(invalid("two-cliques needs at least 2 nodes per block"));
    }
    let mut arcs = Vec::with_capacity(n * (n - 1));
    for block in 0..2u32 {
        let base = block * n as u32;
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                arcs.push((base + i, base + j, 1));
            }
        }
    }
    built(2 * n, arcs)
}

/// Erdős-Rényi G(n, p), bidirected. Used for reduction and oracle test
/// instances rather than the experiment sweeps.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut stream = RandomStream::new(seed, domain::NETGEN);
    let mut arcs = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if stream.next_f64() < p {
                arcs.push((i, j, 1));
            }
        }
    }
    built(n, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn out_degrees(g: &Graph) -> Vec<usize> {
        g.nodes().map(|v| g.out_edges(v).len()).collect()
    }

    #[test]
    fn grid_edge_counts() {
        let g = grid_2d(20, 20).unwrap();
        assert_eq!(g.node_count(), 400);
        assert_eq!(g.edge_count(), 1520);
        let tiny = grid_2d(1, 2).unwrap();
        assert_eq!(tiny.node_count(), 2);
        assert_eq!(tiny.edge_count(), 2);
        let single = grid_2d(1, 1).unwrap();
        assert_eq!(single.node_count(), 1);
        assert_eq!(single.edge_count(), 0);
    }

    #[test]
    fn regular_degrees_are_exact() {
        let g = random_regular(400, 10, 1).unwrap();
        assert_eq!(g.edge_count(), 4000);
        assert!(out_degrees(&g).iter().all(|&d| d == 10));
        let inn: Vec<usize> = g.nodes().map(|v| g.in_edges(v).len()).collect();
        assert!(inn.iter().all(|&d| d == 10));
    }

    #[test]
    fn three_regular_on_four_nodes_is_complete() {
        let g = random_regular(4, 3, 9).unwrap();
        assert_eq!(g.edge_count(), 12);
        for i in 0..4u32 {
            for j in 0..4u32 {
                if i != j {
                    assert!(g.find_edge(NodeId(i), NodeId(j)).is_some());
                }
            }
        }
    }

    #[test]
    fn regular_rejects_odd_total_degree() {
        assert!(random_regular(5, 3, 1).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_regular(60, 6, 5).unwrap(), random_regular(60, 6, 5).unwrap());
        assert_eq!(
            watts_strogatz(80, 3, 0.2, 5).unwrap(),
            watts_strogatz(80, 3, 0.2, 5).unwrap()
        );
        assert_eq!(
            barabasi_albert(80, 4, 5).unwrap(),
            barabasi_albert(80, 4, 5).unwrap()
        );
        assert_eq!(random_gnp(30, 0.3, 5).unwrap(), random_gnp(30, 0.3, 5).unwrap());
    }

    #[test]
    fn small_world_without_rewiring_is_the_ring_lattice() {
        let g = watts_strogatz(400, 5, 0.0, 3).unwrap();
        assert_eq!(g.edge_count(), 4000);
        assert!(out_degrees(&g).iter().all(|&d| d == 10));
        assert!(g.find_edge(NodeId(0), NodeId(5)).is_some());
        assert!(g.find_edge(NodeId(0), NodeId(6)).is_none());
    }

    #[test]
    fn rewiring_preserves_edge_count() {
        let g = watts_strogatz(400, 5, 0.1, 3).unwrap();
        assert_eq!(g.edge_count(), 4000);
    }

    #[test]
    fn full_rewiring_breaks_degree_regularity() {
        // With beta = 1 the lattice randomizes; degrees should vary for at
        // least one of a handful of seeds.
        let varied = (0..5).any(|seed| {
            let g = watts_strogatz(50, 2, 1.0, seed).unwrap();
            let degs = out_degrees(&g);
            degs.iter().any(|&d| d != degs[0])
        });
        assert!(varied);
    }

    #[test]
    fn preferential_attachment_edge_count() {
        let g = barabasi_albert(400, 5, 7).unwrap();
        // C(6, 2) undirected seed edges plus 5 per added node, bidirected.
        let undirected = 15 + (400 - 6) * 5;
        assert_eq!(g.edge_count(), 2 * undirected);
        assert_eq!(g.edge_count(), 2 * 1985);
    }

    #[test]
    fn preferential_attachment_seed_only_is_complete() {
        let g = barabasi_albert(6, 5, 1).unwrap();
        assert_eq!(g.edge_count(), 30);
    }

    #[test]
    fn clique_edge_counts() {
        let g = clique(200).unwrap();
        assert_eq!(g.edge_count(), 39_800);
    }

    #[test]
    fn two_cliques_are_disjoint() {
        let g = two_cliques(3).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 12);
        for e in g.edges() {
            assert_eq!(e.src.0 < 3, e.dst.0 < 3, "edge crosses the blocks");
        }
    }

    #[test]
    fn spec_dispatch_matches_direct_calls() {
        let spec = GenSpec::SmallWorld {
            n: 60,
            side: 2,
            beta: 0.1,
            seed: 11,
        };
        assert_eq!(spec.generate().unwrap(), watts_strogatz(60, 2, 0.1, 11).unwrap());
        assert_eq!(spec.id(), "smallworld-n60-side2-beta0.1-s11");
    }
}
