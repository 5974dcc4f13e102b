//! Brute-force verifiers and known-answer fixtures: the 4-node
//! non-submodularity counterexample, exhaustive submodularity checking, and
//! the independent-set reduction as an instance generator whose optimum is
//! known exactly.

use crate::diffusion::{exact_difference, exact_spread};
use crate::error::{capacity, invalid, Result};
use crate::graph::{build_graph, Graph, Model, NodeId, SeedSet};
use crate::uncertainty::{extreme_params, Direction, UncertaintyModel};

/// The 4-node instance on which the spread difference fails submodularity:
/// a path `u -> v -> x -> y` where `(v, x)` and `(x, y)` are certain
/// (interval `[1, 1]`) and `(u, v)` is adversarial (interval `[0, 1]`).
/// Nodes `u, v, x, y` get ids `0..4`.
pub fn counterexample_instance() -> (Graph, UncertaintyModel) {
    let (g, _) = build_graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], false)
        .expect("fixture arcs are valid");
    let mut lower = vec![1.0; 3];
    let mut upper = vec![1.0; 3];
    let adversarial = g
        .find_edge(NodeId(0), NodeId(1))
        .expect("fixture edge (u, v) exists");
    lower[adversarial.index()] = 0.0;
    upper[adversarial.index()] = 1.0;
    let u = UncertaintyModel::new(&g, Model::Ic, lower, upper).expect("fixture intervals valid");
    (g, u)
}

/// A submodularity violation: the marginal of `node` at the smaller set is
/// strictly below its marginal at the larger superset.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub smaller: SeedSet,
    pub larger: SeedSet,
    pub node: NodeId,
    pub marginal_smaller: f64,
    pub marginal_larger: f64,
}

/// Exhaustive submodularity checking is limited to this many nodes.
pub const MAX_CHECK_NODES: usize = 12;
const VIOLATION_TOL: f64 = 1e-9;

/// Enumerates every `S ⊆ T ⊆ V`, `v ∉ T` and reports each pair where the
/// marginal at `S` is strictly below the marginal at `T` for the exact
/// spread difference of the dominated pair.
pub fn difference_submodularity_violations(
    g: &Graph,
    plus: &crate::graph::ParamVector,
    minus: &crate::graph::ParamVector,
) -> Result<Vec<Violation>> {
    let seeds_of = |mask: u32| mask_to_seeds(mask);
    let table = value_table(g.node_count(), |mask| {
        exact_difference(g, plus, minus, &seeds_of(mask))
    })?;
    Ok(violations_from_table(g.node_count(), &table))
}

/// Same enumeration for a single exact spread objective (expected to come
/// back empty: the spread is submodular).
pub fn spread_submodularity_violations(
    g: &Graph,
    theta: &crate::graph::ParamVector,
) -> Result<Vec<Violation>> {
    let seeds_of = |mask: u32| mask_to_seeds(mask);
    let table = value_table(g.node_count(), |mask| exact_spread(g, theta, &seeds_of(mask)))?;
    Ok(violations_from_table(g.node_count(), &table))
}

fn mask_to_seeds(mask: u32) -> SeedSet {
    SeedSet::from_nodes((0..32).filter(|&v| mask >> v & 1 == 1).map(NodeId))
}

fn value_table(n: usize, mut eval: impl FnMut(u32) -> Result<f64>) -> Result<Vec<f64>> {
    if n > MAX_CHECK_NODES {
        return Err(capacity(format!(
            "submodularity check on {n} nodes exceeds the {MAX_CHECK_NODES}-node bound"
        )));
    }
    (0..1u32 << n).map(&mut eval).collect()
}

fn violations_from_table(n: usize, values: &[f64]) -> Vec<Violation> {
    let mut out = Vec::new();
    for t in 0..(1u32 << n) {
        for v in 0..n as u32 {
            if t >> v & 1 == 1 {
                continue;
            }
            let marginal_larger = values[(t | 1 << v) as usize] - values[t as usize];
            // All proper submasks s of t.
            let mut s = t;
            loop {
                s = s.wrapping_sub(1) & t;
                if s == t {
                    break; // only happens for t = 0
                }
                let marginal_smaller = values[(s | 1 << v) as usize] - values[s as usize];
                if marginal_smaller < marginal_larger - VIOLATION_TOL {
                    out.push(Violation {
                        smaller: mask_to_seeds(s),
                        larger: mask_to_seeds(t),
                        node: NodeId(v),
                        marginal_smaller,
                        marginal_larger,
                    });
                }
                if s == 0 {
                    break;
                }
            }
        }
    }
    out
}

/// The bipartite instance built from a source graph: node `i` splits into
/// `i` (left) and `n + i` (right), every source arc `(i, j)` becomes a
/// certain left-to-right edge `(i, n+j)`, and every node contributes an
/// adversarial matching edge `(i, n+i)` with interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub graph: Graph,
    pub uncertainty: UncertaintyModel,
    pub source: Graph,
}

pub fn reduction_instance(source: &Graph) -> Result<ReductionInstance> {
    let n = source.node_count();
    let mut arcs: Vec<(u32, u32, u32)> = Vec::with_capacity(n + source.edge_count());
    for i in 0..n as u32 {
        arcs.push((i, n as u32 + i, 1));
    }
    for e in source.edges() {
        arcs.push((e.src.0, n as u32 + e.dst.0, 1));
    }
    let (graph, _) = build_graph(2 * n, &arcs, false)?;
    let mut lower = Vec::with_capacity(graph.edge_count());
    let mut upper = Vec::with_capacity(graph.edge_count());
    for e in graph.edges() {
        if e.dst.0 == n as u32 + e.src.0 {
            lower.push(0.0); // matching edge, adversarial
            upper.push(1.0);
        } else {
            lower.push(1.0); // source edge, certain
            upper.push(1.0);
        }
    }
    let uncertainty = UncertaintyModel::new(&graph, Model::Ic, lower, upper)?;
    Ok(ReductionInstance {
        graph,
        uncertainty,
        source: source.clone(),
    })
}

/// Exhaustive maximum-independent-set size is limited to this many nodes.
pub const MAX_MIS_NODES: usize = 20;

/// Maximum independent set size by branch-and-bound enumeration, reading the
/// graph as undirected.
pub fn mis_bruteforce(g: &Graph) -> Result<usize> {
    let n = g.node_count();
    if n > MAX_MIS_NODES {
        return Err(capacity(format!(
            "MIS enumeration on {n} nodes exceeds the {MAX_MIS_NODES}-node bound"
        )));
    }
    let mut nb = vec![0u32; n];
    for e in g.edges() {
        nb[e.src.index()] |= 1 << e.dst.0;
        nb[e.dst.index()] |= 1 << e.src.0;
    }
    fn recurse(cand: u32, size: usize, nb: &[u32], best: &mut usize) {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        let v = cand.trailing_zeros();
        recurse(cand & !nb[v as usize] & !(1 << v), size + 1, nb, best);
        recurse(cand & !(1 << v), size, nb, best);
    }
    let mut best = 0;
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    recurse(all, 0, &nb, &mut best);
    Ok(best)
}

/// Checks the reduction's defining equality on one source graph: the
/// unconstrained exact-difference optimum of the reduction instance equals
/// the brute-force maximum-independent-set size.
///
/// Any right-side node can be dropped from a solution without lowering the
/// objective, so the enumeration ranges over left-side subsets only.
pub fn check_reduction(source: &Graph) -> Result<bool> {
    let n = source.node_count();
    if n > MAX_MIS_NODES {
        return Err(capacity(format!(
            "reduction check on {n} nodes exceeds the {MAX_MIS_NODES}-node bound"
        )));
    }
    let mis = mis_bruteforce(source)?;
    let instance = reduction_instance(source)?;
    let plus = extreme_params(&instance.graph, &instance.uncertainty, Direction::Upper);
    let minus = extreme_params(&instance.graph, &instance.uncertainty, Direction::Lower);
    let mut best = f64::NEG_INFINITY;
    for mask in 0u64..(1u64 << n) {
        let seeds = SeedSet::from_nodes((0..n as u32).filter(|&v| mask >> v & 1 == 1).map(NodeId));
        let value = exact_difference(&instance.graph, &plus, &minus, &seeds)?;
        best = best.max(value);
    }
    if !best.is_finite() {
        return Err(invalid("reduction enumeration produced no value"));
    }
    Ok((best - mis as f64).abs() < 1e-9)
}
