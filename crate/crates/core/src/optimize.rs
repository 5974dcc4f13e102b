//! Seed selection: naive greedy, lazy (CELF) greedy, Random Greedy for
//! non-monotone objectives, and exhaustive enumeration as a test oracle.
//!
//! Greedy trajectories need a deterministic objective, so the Monte Carlo
//! objectives here are sample-average approximations over a frozen set of
//! tapes: the tapes are realized once from the master seed and every
//! evaluation averages over exactly those tapes. Lazy greedy only matches
//! naive greedy when the objective is submodular (stale cached gains are
//! upper bounds in that case); the spread difference objective is not
//! submodular, so Random Greedy re-evaluates every remaining candidate each
//! iteration unless the lazy variant is explicitly requested.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{
    exact_capacity, exact_difference, exact_spread, tape_key, Estimate, EstimatorConfig, LiveAdj,
    LiveRule,
};
use crate::error::{capacity, invalid, Result};
use crate::graph::{Graph, NodeId, ParamVector, SeedSet};
use crate::rng::{domain, RandomStream};

/// A set function over the nodes of a graph. Implementations must be
/// deterministic: repeated evaluation of the same set yields the same value.
pub trait Objective: Sync {
    /// Size of the ground set.
    fn ground_size(&self) -> usize;

    /// Value of a seed set. Must be well-defined for the empty set.
    fn evaluate(&self, seeds: &SeedSet) -> f64;

    /// Marginal gains of adding each candidate to `base`. The default
    /// evaluates each candidate set from scratch; implementations with
    /// per-tape state override this.
    fn marginal_gains(&self, base: &SeedSet, candidates: &[NodeId]) -> Vec<f64> {
        let base_value = self.evaluate(base);
        candidates
            .par_iter()
            .map(|&c| self.evaluate(&base.with(c)) - base_value)
            .collect()
    }
}

/// Exact expected spread, for instances inside the exact-oracle capacity.
pub struct ExactSpread<'a> {
    g: &'a Graph,
    theta: &'a ParamVector,
}

impl<'a> ExactSpread<'a> {
    pub fn new(g: &'a Graph, theta: &'a ParamVector) -> Result<Self> {
        exact_capacity(g, theta)?;
        Ok(ExactSpread { g, theta })
    }
}

impl Objective for ExactSpread<'_> {
    fn ground_size(&self) -> usize {
        self.g.node_count()
    }

    fn evaluate(&self, seeds: &SeedSet) -> f64 {
        exact_spread(self.g, self.theta, seeds).expect("capacity validated at construction")
    }
}

/// Exact spread difference between a dominated parameter pair.
pub struct ExactDifference<'a> {
    g: &'a Graph,
    plus: &'a ParamVector,
    minus: &'a ParamVector,
}

impl<'a> ExactDifference<'a> {
    pub fn new(g: &'a Graph, plus: &'a ParamVector, minus: &'a ParamVector) -> Result<Self> {
        if !minus.dominated_by(plus, 1e-12) {
            return Err(invalid("upper parameters must dominate the lower ones"));
        }
        exact_capacity(g, plus)?;
        exact_capacity(g, minus)?;
        Ok(ExactDifference { g, plus, minus })
    }
}

impl Objective for ExactDifference<'_> {
    fn ground_size(&self) -> usize {
        self.g.node_count()
    }

    fn evaluate(&self, seeds: &SeedSet) -> f64 {
        exact_difference(self.g, self.plus, self.minus, seeds)
            .expect("capacity and dominance validated at construction")
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn test_bit(words: &[u64], v: u32) -> bool {
    words[(v / 64) as usize] >> (v % 64) & 1 == 1
}

/// Sample-average spread objective over a frozen tape set.
pub struct SaaSpread<'a> {
    g: &'a Graph,
    tapes: Vec<LiveAdj>,
    parallel: bool,
}

impl<'a> SaaSpread<'a> {
    pub fn new(g: &'a Graph, theta: &ParamVector, cfg: &EstimatorConfig) -> Result<Self> {
        if theta.values().len() != g.edge_count() {
            return Err(invalid("parameter vector does not match the graph"));
        }
        if cfg.samples == 0 {
            return Err(invalid("objective needs at least one sample"));
        }
        let rule = LiveRule::for_params(g, theta);
        let tapes = realize_tapes(g, cfg, |key| LiveAdj::realize(g, &rule, key));
        Ok(SaaSpread {
            g,
            tapes,
            parallel: cfg.parallelism != 1,
        })
    }

    /// Mean and standard error over the frozen tapes.
    pub fn estimate(&self, seeds: &SeedSet) -> Estimate {
        let counts = per_tape_counts(&self.tapes, self.g.node_count(), seeds, self.parallel);
        estimate_from_counts(&counts)
    }
}

impl Objective for SaaSpread<'_> {
    fn ground_size(&self) -> usize {
        self.g.node_count()
    }

    fn evaluate(&self, seeds: &SeedSet) -> f64 {
        self.estimate(seeds).mean
    }

    fn marginal_gains(&self, base: &SeedSet, candidates: &[NodeId]) -> Vec<f64> {
        let n = self.g.node_count();
        let words = words_for(n);
        let active = base_actives(&self.tapes, words, base, self.parallel);
        let m = self.tapes.len() as f64;
        let per_candidate = |scratch: &mut (Vec<u64>, Vec<u32>), c: NodeId| -> f64 {
            let (copy, stack) = scratch;
            let mut sum = 0u64;
            for (t, tape) in self.tapes.iter().enumerate() {
                let base_words = &active[t * words..(t + 1) * words];
                if test_bit(base_words, c.0) {
                    continue;
                }
                copy.copy_from_slice(base_words);
                sum += tape.activate(&[c], copy, stack) as u64;
            }
            sum as f64 / m
        };
        let make_scratch = || (vec![0u64; words], Vec::new());
        if self.parallel {
            candidates
                .par_iter()
                .map_init(make_scratch, |scratch, &c| per_candidate(scratch, c))
                .collect()
        } else {
            let mut scratch = make_scratch();
            candidates.iter().map(|&c| per_candidate(&mut scratch, c)).collect()
        }
    }
}

/// Sample-average spread-difference objective: each tape realizes the
/// dominated pair jointly (coupled), so per-tape values are nonnegative.
pub struct SaaDifference<'a> {
    g: &'a Graph,
    tapes: Vec<(LiveAdj, LiveAdj)>,
    parallel: bool,
}

impl<'a> SaaDifference<'a> {
    pub fn new(
        g: &'a Graph,
        plus: &ParamVector,
        minus: &ParamVector,
        cfg: &EstimatorConfig,
    ) -> Result<Self> {
        if plus.values().len() != g.edge_count() {
            return Err(invalid("parameter vector does not match the graph"));
        }
        if !minus.dominated_by(plus, 1e-12) {
            return Err(invalid("upper parameters must dominate the lower ones"));
        }
        if cfg.samples == 0 {
            return Err(invalid("objective needs at least one sample"));
        }
        let rule_plus = LiveRule::for_params(g, plus);
        let rule_minus = LiveRule::for_coupled(g, minus, plus);
        let tapes = realize_tapes(g, cfg, |key| {
            (
                LiveAdj::realize(g, &rule_plus, key),
                LiveAdj::realize(g, &rule_minus, key),
            )
        });
        Ok(SaaDifference {
            g,
            tapes,
            parallel: cfg.parallelism != 1,
        })
    }

    pub fn estimate(&self, seeds: &SeedSet) -> Estimate {
        let n = self.g.node_count();
        let words = words_for(n);
        let per_tape = |scratch: &mut (Vec<u64>, Vec<u32>), pair: &(LiveAdj, LiveAdj)| -> u64 {
            let (visited, stack) = scratch;
            visited.fill(0);
            let above = pair.0.activate(seeds.as_slice(), visited, stack);
            visited.fill(0);
            let below = pair.1.activate(seeds.as_slice(), visited, stack);
            debug_assert!(below <= above);
            (above - below) as u64
        };
        let make_scratch = || (vec![0u64; words], Vec::new());
        let counts: Vec<u64> = if self.parallel {
            self.tapes
                .par_iter()
                .map_init(make_scratch, |scratch, pair| per_tape(scratch, pair))
                .collect()
        } else {
            let mut scratch = make_scratch();
            self.tapes.iter().map(|pair| per_tape(&mut scratch, pair)).collect()
        };
        estimate_from_counts(&counts)
    }
}

impl Objective for SaaDifference<'_> {
    fn ground_size(&self) -> usize {
        self.g.node_count()
    }

    fn evaluate(&self, seeds: &SeedSet) -> f64 {
        self.estimate(seeds).mean
    }

    fn marginal_gains(&self, base: &SeedSet, candidates: &[NodeId]) -> Vec<f64> {
        let n = self.g.node_count();
        let words = words_for(n);
        let plus_tapes: Vec<&LiveAdj> = self.tapes.iter().map(|p| &p.0).collect();
        let minus_tapes: Vec<&LiveAdj> = self.tapes.iter().map(|p| &p.1).collect();
        let active_plus = base_actives_ref(&plus_tapes, words, base, self.parallel);
        let active_minus = base_actives_ref(&minus_tapes, words, base, self.parallel);
        let m = self.tapes.len() as f64;
        let per_candidate = |scratch: &mut (Vec<u64>, Vec<u32>), c: NodeId| -> f64 {
            let (copy, stack) = scratch;
            let mut sum = 0i64;
            for (t, (plus, minus)) in self.tapes.iter().enumerate() {
                let base_plus = &active_plus[t * words..(t + 1) * words];
                if !test_bit(base_plus, c.0) {
                    copy.copy_from_slice(base_plus);
                    sum += plus.activate(&[c], copy, stack) as i64;
                }
                let base_minus = &active_minus[t * words..(t + 1) * words];
                if !test_bit(base_minus, c.0) {
                    copy.copy_from_slice(base_minus);
                    sum -= minus.activate(&[c], copy, stack) as i64;
                }
            }
            sum as f64 / m
        };
        let make_scratch = || (vec![0u64; words], Vec::new());
        if self.parallel {
            candidates
                .par_iter()
                .map_init(make_scratch, |scratch, &c| per_candidate(scratch, c))
                .collect()
        } else {
            let mut scratch = make_scratch();
            candidates.iter().map(|&c| per_candidate(&mut scratch, c)).collect()
        }
    }
}

fn realize_tapes<T: Send>(
    g: &Graph,
    cfg: &EstimatorConfig,
    realize: impl Fn(u64) -> T + Sync + Send,
) -> Vec<T> {
    let _ = g;
    let keys = (0..cfg.samples).map(|i| tape_key(cfg.master_seed, i as u64));
    if cfg.parallelism == 1 {
        keys.map(realize).collect()
    } else {
        keys.collect::<Vec<_>>().into_par_iter().map(realize).collect()
    }
}

fn per_tape_counts(tapes: &[LiveAdj], n: usize, seeds: &SeedSet, parallel: bool) -> Vec<u64> {
    let words = words_for(n);
    let per_tape = |scratch: &mut (Vec<u64>, Vec<u32>), tape: &LiveAdj| -> u64 {
        let (visited, stack) = scratch;
        visited.fill(0);
        tape.activate(seeds.as_slice(), visited, stack) as u64
    };
    let make_scratch = || (vec![0u64; words], Vec::new());
    if parallel {
        tapes
            .par_iter()
            .map_init(make_scratch, |scratch, tape| per_tape(scratch, tape))
            .collect()
    } else {
        let mut scratch = make_scratch();
        tapes.iter().map(|tape| per_tape(&mut scratch, tape)).collect()
    }
}

fn base_actives(tapes: &[LiveAdj], words: usize, base: &SeedSet, parallel: bool) -> Vec<u64> {
    let refs: Vec<&LiveAdj> = tapes.iter().collect();
    base_actives_ref(&refs, words, base, parallel)
}

fn base_actives_ref(tapes: &[&LiveAdj], words: usize, base: &SeedSet, parallel: bool) -> Vec<u64> {
    let mut active = vec![0u64; tapes.len() * words];
    if parallel {
        active
            .par_chunks_mut(words)
            .enumerate()
            .for_each_init(Vec::new, |stack, (t, chunk)| {
                tapes[t].activate(base.as_slice(), chunk, stack);
            });
    } else {
        let mut stack = Vec::new();
        for (t, chunk) in active.chunks_mut(words).enumerate() {
            tapes[t].activate(base.as_slice(), chunk, &mut stack);
        }
    }
    active
}

fn estimate_from_counts(counts: &[u64]) -> Estimate {
    let m = counts.len();
    let sum: u64 = counts.iter().sum();
    let sumsq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let mean = sum as f64 / m as f64;
    let stderr = if m < 2 {
        0.0
    } else {
        let var = (sumsq as f64 - (sum as f64) * (sum as f64) / m as f64) / (m as f64 - 1.0);
        (var.max(0.0) / m as f64).sqrt()
    };
    Estimate {
        mean,
        stderr,
        samples: m,
    }
}

/// One candidate in a selection pool. `node: None` is a zero-gain dummy
/// element (Random Greedy pads the ground set with them so the exact-size
/// pool always exists).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub node: Option<NodeId>,
    pub gain: f64,
}

/// What happened in one greedy iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Element added this iteration; `None` means a dummy was drawn.
    pub chosen: Option<NodeId>,
    /// Marginal gain estimate of the chosen element at selection time.
    pub gain: f64,
    /// Candidate pool the choice was made from.
    pub pool: Vec<PoolEntry>,
}

/// Selection result: the chosen set, the per-iteration records, and the
/// objective value of the final set (re-evaluated once at the end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyReport {
    pub selected: SeedSet,
    pub iterations: Vec<IterationRecord>,
    pub value: f64,
}

fn check_k(obj: &dyn Objective, k: usize) -> Result<()> {
    if k > obj.ground_size() {
        return Err(invalid(format!(
            "k = {k} exceeds the ground set size {}",
            obj.ground_size()
        )));
    }
    Ok(())
}

fn all_nodes(n: usize) -> Vec<NodeId> {
    (0..n as u32).map(NodeId).collect()
}

/// Naive greedy: every iteration re-evaluates the marginal gain of every
/// remaining element and adds the best one (ties to the smallest node id).
pub fn greedy(obj: &dyn Objective, k: usize) -> Result<GreedyReport> {
    check_k(obj, k)?;
    let mut selected = SeedSet::empty();
    let mut remaining = all_nodes(obj.ground_size());
    let mut iterations = Vec::with_capacity(k);
    for _ in 0..k {
        let gains = obj.marginal_gains(&selected, &remaining);
        let mut best = 0;
        for i in 1..remaining.len() {
            if gains[i] > gains[best] {
                best = i;
            }
        }
        let node = remaining.remove(best);
        let gain = gains[best];
        selected.insert(node);
        iterations.push(IterationRecord {
            chosen: Some(node),
            gain,
            pool: vec![PoolEntry {
                node: Some(node),
                gain,
            }],
        });
    }
    let value = obj.evaluate(&selected);
    Ok(GreedyReport {
        selected,
        iterations,
        value,
    })
}

#[derive(Debug)]
struct HeapEntry {
    gain: f64,
    node: NodeId,
    round: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on gain; among equal gains pop the smallest node first.
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Lazy (CELF) greedy: cached gains are re-verified on pop and the top is
/// accepted only once its gain is current for this iteration. Identical to
/// naive greedy whenever the objective is submodular, since stale caches are
/// then upper bounds.
pub fn lazy_greedy(obj: &dyn Objective, k: usize) -> Result<GreedyReport> {
    check_k(obj, k)?;
    let mut selected = SeedSet::empty();
    let mut iterations = Vec::with_capacity(k);
    let nodes = all_nodes(obj.ground_size());
    let initial = obj.marginal_gains(&selected, &nodes);
    let mut heap: std::collections::BinaryHeap<HeapEntry> = nodes
        .iter()
        .zip(&initial)
        .map(|(&node, &gain)| HeapEntry {
            gain,
            node,
            round: 0,
        })
        .collect();

    for round in 0..k {
        loop {
            let top = heap.pop().expect("k <= ground size leaves candidates");
            if top.round == round {
                selected.insert(top.node);
                iterations.push(IterationRecord {
                    chosen: Some(top.node),
                    gain: top.gain,
                    pool: vec![PoolEntry {
                        node: Some(top.node),
                        gain: top.gain,
                    }],
                });
                break;
            }
            let gain = obj.marginal_gains(&selected, &[top.node])[0];
            heap.push(HeapEntry {
                gain,
                node: top.node,
                round,
            });
        }
    }
    let value = obj.evaluate(&selected);
    Ok(GreedyReport {
        selected,
        iterations,
        value,
    })
}

fn sort_pool(entries: &mut [PoolEntry]) {
    // Gain descending; among equals real elements before dummies, real ties
    // by smallest node id. Stable sort keeps dummies interchangeable.
    entries.sort_by(|a, b| {
        b.gain.total_cmp(&a.gain).then_with(|| match (a.node, b.node) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        })
    });
}

fn draw_from_pool(
    pool: Vec<PoolEntry>,
    stream: &mut RandomStream,
    selected: &mut SeedSet,
    remaining: &mut Vec<NodeId>,
    dummies: &mut usize,
    iterations: &mut Vec<IterationRecord>,
) {
    let j = stream.next_below(pool.len() as u64) as usize;
    let drawn = pool[j];
    match drawn.node {
        Some(node) => {
            selected.insert(node);
            remaining.retain(|&v| v != node);
        }
        None => *dummies -= 1,
    }
    iterations.push(IterationRecord {
        chosen: drawn.node,
        gain: drawn.gain,
        pool,
    });
}

/// Random Greedy for an exact-size-k selection: each iteration forms the
/// pool of the k largest marginal gains (the ground set is padded with k
/// zero-gain dummies) and draws one of them uniformly. Dummies are stripped
/// from the returned set, so it can end up smaller than k.
pub fn random_greedy(obj: &dyn Objective, k: usize, seed: u64) -> Result<GreedyReport> {
    check_k(obj, k)?;
    let mut stream = RandomStream::new(seed, domain::GREEDY);
    let mut selected = SeedSet::empty();
    let mut remaining = all_nodes(obj.ground_size());
    let mut dummies = k;
    let mut iterations = Vec::with_capacity(k);
    for _ in 0..k {
        let gains = obj.marginal_gains(&selected, &remaining);
        let mut entries: Vec<PoolEntry> = remaining
            .iter()
            .zip(&gains)
            .map(|(&node, &gain)| PoolEntry {
                node: Some(node),
                gain,
            })
            .collect();
        entries.extend((0..dummies).map(|_| PoolEntry {
            node: None,
            gain: 0.0,
        }));
        sort_pool(&mut entries);
        entries.truncate(k);
        draw_from_pool(
            entries,
            &mut stream,
            &mut selected,
            &mut remaining,
            &mut dummies,
            &mut iterations,
        );
    }
    let value = obj.evaluate(&selected);
    Ok(GreedyReport {
        selected,
        iterations,
        value,
    })
}

/// Random Greedy with CELF-style lazy pool construction. Exact only for
/// submodular objectives; offered as the opt-in accelerated path.
pub fn random_greedy_lazy(obj: &dyn Objective, k: usize, seed: u64) -> Result<GreedyReport> {
    check_k(obj, k)?;
    let mut stream = RandomStream::new(seed, domain::GREEDY);
    let mut selected = SeedSet::empty();
    let mut remaining = all_nodes(obj.ground_size());
    let mut dummies = k;
    let mut iterations = Vec::with_capacity(k);
    let initial = obj.marginal_gains(&selected, &remaining);
    let mut heap: std::collections::BinaryHeap<HeapEntry> = remaining
        .iter()
        .zip(&initial)
        .map(|(&node, &gain)| HeapEntry {
            gain,
            node,
            round: 0,
        })
        .collect();

    for round in 0..k {
        // Pop until the k best entries for this round are all fresh.
        let mut fresh: Vec<HeapEntry> = Vec::with_capacity(k);
        while fresh.len() < k {
            let Some(top) = heap.pop() else { break };
            if !remaining.contains(&top.node) {
                continue;
            }
            if top.round == round {
                fresh.push(top);
            } else {
                let gain = obj.marginal_gains(&selected, &[top.node])[0];
                heap.push(HeapEntry {
                    gain,
                    node: top.node,
                    round,
                });
            }
        }
        let mut entries: Vec<PoolEntry> = fresh
            .iter()
            .map(|e| PoolEntry {
                node: Some(e.node),
                gain: e.gain,
            })
            .collect();
        entries.extend((0..dummies).map(|_| PoolEntry {
            node: None,
            gain: 0.0,
        }));
        sort_pool(&mut entries);
        entries.truncate(k);
        // Unselected fresh entries keep their (still current) gains cached.
        for e in fresh {
            heap.push(e);
        }
        draw_from_pool(
            entries,
            &mut stream,
            &mut selected,
            &mut remaining,
            &mut dummies,
            &mut iterations,
        );
    }
    let value = obj.evaluate(&selected);
    Ok(GreedyReport {
        selected,
        iterations,
        value,
    })
}

/// Cardinality regime for [`exhaustive_opt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalityMode {
    Exactly(usize),
    Unconstrained,
}

const MAX_EXHAUSTIVE_COMBINATIONS: u64 = 1_000_000;
const MAX_EXHAUSTIVE_SUBSET_NODES: usize = 20;

/// True optimum by enumeration; ties go to the lexicographically smallest
/// node set. Returns the optimal set and its value.
pub fn exhaustive_opt(obj: &dyn Objective, mode: CardinalityMode) -> Result<(SeedSet, f64)> {
    let n = obj.ground_size();
    match mode {
        CardinalityMode::Exactly(k) => {
            check_k(obj, k)?;
            let combos = binomial(n as u64, k as u64);
            if combos > MAX_EXHAUSTIVE_COMBINATIONS {
                return Err(capacity(format!(
                    "C({n}, {k}) = {combos} exceeds the enumeration bound"
                )));
            }
            let mut best: Option<(SeedSet, f64)> = None;
            let mut indices: Vec<usize> = (0..k).collect();
            loop {
                let set = SeedSet::from_nodes(indices.iter().map(|&i| NodeId(i as u32)));
                let value = obj.evaluate(&set);
                if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
                    best = Some((set, value));
                }
                if !next_combination(&mut indices, n) {
                    break;
                }
            }
            Ok(best.expect("at least one combination exists"))
        }
        CardinalityMode::Unconstrained => {
            if n > MAX_EXHAUSTIVE_SUBSET_NODES {
                return Err(capacity(format!(
                    "2^{n} subsets exceed the enumeration bound"
                )));
            }
            let mut best: Option<(SeedSet, f64)> = None;
            for mask in 0u64..(1u64 << n) {
                let set = SeedSet::from_nodes(
                    (0..n as u32).filter(|&v| mask >> v & 1 == 1).map(NodeId),
                );
                let value = obj.evaluate(&set);
                let better = match &best {
                    None => true,
                    Some((bs, bv)) => {
                        value > *bv || (value == *bv && set.as_slice() < bs.as_slice())
                    }
                };
                if better {
                    best = Some((set, value));
                }
            }
            Ok(best.expect("the empty set is always enumerated"))
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Advances `indices` to the next k-combination of `0..n` in lexicographic
/// order; false when exhausted. An empty slice has a single combination.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let k = indices.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] < n - (k - i) {
            indices[i] += 1;
            for j in i + 1..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Model};

    /// Deterministic toy objective defined by a value table over node masks.
    struct TableObjective {
        n: usize,
        values: Vec<f64>,
    }

    impl TableObjective {
        fn mask(seeds: &SeedSet) -> usize {
            seeds.iter().fold(0usize, |m, v| m | 1 << v.0)
        }
    }

    impl Objective for TableObjective {
        fn ground_size(&self) -> usize {
            self.n
        }
        fn evaluate(&self, seeds: &SeedSet) -> f64 {
            self.values[Self::mask(seeds)]
        }
    }

    fn star_graph() -> Graph {
        build_graph(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], false).unwrap().0
    }

    #[test]
    fn greedy_selects_the_dominant_node() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![1.0; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        for report in [greedy(&obj, 1).unwrap(), lazy_greedy(&obj, 1).unwrap()] {
            assert_eq!(report.selected, SeedSet::from_ids([0]));
            assert_eq!(report.value, 4.0);
        }
    }

    #[test]
    fn zero_k_returns_the_empty_set_value() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![1.0; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        let report = greedy(&obj, 0).unwrap();
        assert!(report.selected.is_empty());
        assert_eq!(report.value, 0.0);
        assert!(report.iterations.is_empty());
    }

    #[test]
    fn k_larger_than_ground_set_is_an_input_error() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![1.0; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        assert!(greedy(&obj, 5).is_err());
        assert!(random_greedy(&obj, 5, 1).is_err());
    }

    #[test]
    fn random_greedy_is_deterministic_and_bounded() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![0.5; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        let a = random_greedy(&obj, 2, 9).unwrap();
        let b = random_greedy(&obj, 2, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.selected.len() <= 2);
        assert_eq!(a.value, obj.evaluate(&a.selected));
        assert_eq!(a.iterations.len(), 2);
        for it in &a.iterations {
            assert_eq!(it.pool.len(), 2);
        }
    }

    #[test]
    fn random_greedy_with_k1_is_argmax() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![1.0; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        for seed in 0..10 {
            let report = random_greedy(&obj, 1, seed).unwrap();
            assert_eq!(report.selected, SeedSet::from_ids([0]));
        }
    }

    #[test]
    fn random_greedy_on_a_zero_objective_reports_zero() {
        let obj = TableObjective {
            n: 4,
            values: vec![0.0; 16],
        };
        let report = random_greedy(&obj, 2, 3).unwrap();
        assert_eq!(report.value, 0.0);
        for it in &report.iterations {
            assert_eq!(it.gain, 0.0);
        }
    }

    #[test]
    fn dummies_sort_after_equal_real_candidates() {
        let mut entries = vec![
            PoolEntry { node: None, gain: 0.0 },
            PoolEntry {
                node: Some(NodeId(2)),
                gain: 0.0,
            },
            PoolEntry {
                node: Some(NodeId(1)),
                gain: 0.0,
            },
            PoolEntry {
                node: Some(NodeId(3)),
                gain: 1.0,
            },
        ];
        sort_pool(&mut entries);
        assert_eq!(entries[0].node, Some(NodeId(3)));
        assert_eq!(entries[1].node, Some(NodeId(1)));
        assert_eq!(entries[2].node, Some(NodeId(2)));
        assert_eq!(entries[3].node, None);
    }

    #[test]
    fn exhaustive_opt_handles_both_modes() {
        // Value table rewarding {1, 3} above everything else.
        let mut values = vec![0.0; 16];
        values[0b1010] = 5.0;
        values[0b0010] = 3.0;
        let obj = TableObjective { n: 4, values };
        let (set, value) = exhaustive_opt(&obj, CardinalityMode::Unconstrained).unwrap();
        assert_eq!(set, SeedSet::from_ids([1, 3]));
        assert_eq!(value, 5.0);
        let (set, value) = exhaustive_opt(&obj, CardinalityMode::Exactly(1)).unwrap();
        assert_eq!(set, SeedSet::from_ids([1]));
        assert_eq!(value, 3.0);
    }

    #[test]
    fn exhaustive_ties_go_to_the_lexicographically_smallest_set() {
        let obj = TableObjective {
            n: 3,
            values: vec![0.0; 8],
        };
        let (set, value) = exhaustive_opt(&obj, CardinalityMode::Unconstrained).unwrap();
        assert!(set.is_empty());
        assert_eq!(value, 0.0);
        let (set, _) = exhaustive_opt(&obj, CardinalityMode::Exactly(2)).unwrap();
        assert_eq!(set, SeedSet::from_ids([0, 1]));
    }

    #[test]
    fn exhaustive_with_k_equal_n_returns_everything() {
        let g = star_graph();
        let theta = ParamVector::new(&g, Model::Ic, vec![0.5; 3]).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        let (set, _) = exhaustive_opt(&obj, CardinalityMode::Exactly(4)).unwrap();
        assert_eq!(set, SeedSet::full(4));
    }

    #[test]
    fn greedy_prefers_the_strong_clique() {
        // Two 5-cliques, one with probability 0.9 per edge and one inert;
        // the inert block keeps the instance inside exact-oracle capacity.
        let g = crate::netgen::two_cliques(5).unwrap();
        let values: Vec<f64> = g
            .edges()
            .iter()
            .map(|e| if e.src.0 < 5 { 0.9 } else { 0.0 })
            .collect();
        let theta = ParamVector::new(&g, Model::Ic, values).unwrap();
        let obj = ExactSpread::new(&g, &theta).unwrap();
        let report = lazy_greedy(&obj, 1).unwrap();
        assert!(report.selected.iter().all(|v| v.0 < 5), "picked the inert clique");
        let (opt_set, opt_value) = exhaustive_opt(&obj, CardinalityMode::Exactly(1)).unwrap();
        assert_eq!(report.selected, opt_set);
        assert_eq!(report.value, opt_value);
    }

    #[test]
    fn random_greedy_solves_the_counterexample_fixture() {
        let (g, u) = crate::verify::counterexample_instance();
        let plus = crate::uncertainty::extreme_params(&g, &u, crate::uncertainty::Direction::Upper);
        let minus = crate::uncertainty::extreme_params(&g, &u, crate::uncertainty::Direction::Lower);
        let obj = ExactDifference::new(&g, &plus, &minus).unwrap();
        // Singleton values enumerate to (3, 0, 0, 0), so k = 1 must pick u.
        let singles: Vec<f64> = (0..4u32)
            .map(|v| obj.evaluate(&SeedSet::from_ids([v])))
            .collect();
        assert_eq!(singles, vec![3.0, 0.0, 0.0, 0.0]);
        for seed in 0..5 {
            let report = random_greedy(&obj, 1, seed).unwrap();
            assert_eq!(report.selected, SeedSet::from_ids([0]));
            assert_eq!(report.value, 3.0);
        }
        // The unconstrained brute-force optimum over all 16 subsets agrees.
        let (opt_set, opt_value) = exhaustive_opt(&obj, CardinalityMode::Unconstrained).unwrap();
        assert_eq!(opt_set, SeedSet::from_ids([0]));
        assert_eq!(opt_value, 3.0);
    }

    #[test]
    fn saa_objectives_match_their_estimators() {
        let (g, _) = build_graph(
            6,
            &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 1)],
            false,
        )
        .unwrap();
        let theta = ParamVector::new(&g, Model::Ic, vec![0.4; 6]).unwrap();
        let cfg = EstimatorConfig::new(500, 11);
        let obj = SaaSpread::new(&g, &theta, &cfg).unwrap();
        let seeds = SeedSet::from_ids([0, 3]);
        let est = crate::diffusion::estimate_spread(&g, &theta, &seeds, &cfg).unwrap();
        assert_eq!(obj.evaluate(&seeds), est.mean);
        assert_eq!(obj.estimate(&seeds), est);
    }

    #[test]
    fn saa_marginal_gains_match_naive_evaluation() {
        let (g, _) = build_graph(
            6,
            &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 1)],
            false,
        )
        .unwrap();
        let theta = ParamVector::new(&g, Model::Ic, vec![0.5; 6]).unwrap();
        let plus = ParamVector::new(&g, Model::Ic, vec![0.7; 6]).unwrap();
        let cfg = EstimatorConfig::new(300, 17);
        let base = SeedSet::from_ids([1]);
        let cands: Vec<NodeId> = (0..6).map(NodeId).collect();

        let spread = SaaSpread::new(&g, &theta, &cfg).unwrap();
        let fast = spread.marginal_gains(&base, &cands);
        let base_value = spread.evaluate(&base);
        for (i, &c) in cands.iter().enumerate() {
            let naive = spread.evaluate(&base.with(c)) - base_value;
            assert!((fast[i] - naive).abs() < 1e-12, "spread gain mismatch at {c:?}");
        }

        let diff = SaaDifference::new(&g, &plus, &theta, &cfg).unwrap();
        let fast = diff.marginal_gains(&base, &cands);
        let base_value = diff.evaluate(&base);
        for (i, &c) in cands.iter().enumerate() {
            let naive = diff.evaluate(&base.with(c)) - base_value;
            assert!((fast[i] - naive).abs() < 1e-12, "difference gain mismatch at {c:?}");
        }
    }
}
