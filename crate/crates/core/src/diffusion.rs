//! IC and LT diffusion: live-edge realization, round-by-round simulation,
//! exact small-instance oracles, and coupled Monte Carlo estimators.
//!
//! Randomness is organized as one tape per Monte Carlo sample. A tape holds
//! one uniform per edge (IC) or per node (LT), addressed by entity id through
//! the counter-based generator, so a tape can be regenerated from
//! `(master_seed, sample_index)` alone and the same tape can realize several
//! parameter vectors. Realizing a dominated pair from one tape couples the
//! two diffusions: the lower live-edge set is contained in the upper one
//! sample by sample, which makes every per-sample spread difference
//! nonnegative and cuts the variance of the difference estimator.
//!
//! For the LT model a realization additionally takes a `layout` vector that
//! fixes where each in-edge's sub-interval of `[0, 1)` starts (the cumulative
//! sums of the layout values, in edge-id order). Realizing with
//! `layout = theta` is the standard LT live-edge draw; realizing a dominated
//! `theta` against the dominating layout left-aligns each edge's interval
//! inside the dominating one, which is what makes the LT coupling containment
//! hold per sample.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, invalid, Result};
use crate::graph::{Edge, EdgeId, Graph, Model, NodeId, ParamVector, SeedSet};
use crate::rng::{self, domain};

/// Exact IC oracle refuses instances with more free edges than this.
pub const MAX_EXACT_IC_FREE_EDGES: usize = 20;
/// Exact LT oracle refuses instances with more live-edge configurations.
pub const MAX_EXACT_LT_CONFIGS: u64 = 1 << 20;

/// Dominance comparisons tolerate this much floating-point slack.
pub(crate) const DOMINANCE_TOL: f64 = 1e-12;

/// Per-sample randomness: one uniform per edge (IC) or per node (LT).
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTape {
    model: Model,
    values: Vec<f64>,
    master_seed: u64,
    sample_index: u64,
}

impl RandomTape {
    #[inline]
    pub fn model(&self) -> Model {
        self.model
    }

    /// Uniforms indexed by edge id (IC) or node id (LT).
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> (u64, u64) {
        (self.master_seed, self.sample_index)
    }
}

#[inline]
pub(crate) fn tape_key(master_seed: u64, sample_index: u64) -> u64 {
    rng::derive(rng::derive(master_seed, domain::TAPE), sample_index)
}

#[inline]
fn tape_uniform(key: u64, entity: u32) -> f64 {
    rng::unit_f64(rng::at(key, entity as u64))
}

/// Draws the tape for one sample. Entry `i` is a pure function of
/// `(master_seed, sample_index, i)`, independent of evaluation order.
pub fn draw_tape(g: &Graph, model: Model, master_seed: u64, sample_index: u64) -> RandomTape {
    let key = tape_key(master_seed, sample_index);
    let entities = match model {
        Model::Ic => g.edge_count(),
        Model::Lt => g.node_count(),
    };
    RandomTape {
        model,
        values: (0..entities as u32).map(|i| tape_uniform(key, i)).collect(),
        master_seed,
        sample_index,
    }
}

/// A live-edge realization: one boolean per edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeSample {
    live: Vec<bool>,
}

impl LiveEdgeSample {
    #[inline]
    pub fn is_live(&self, e: EdgeId) -> bool {
        self.live[e.index()]
    }

    pub fn live_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(|(i, _)| EdgeId(i as u32))
    }
}

/// IC realization: edge `e` is live iff `r_e < theta_e`.
pub fn realize_ic(tape: &RandomTape, theta: &ParamVector) -> Result<LiveEdgeSample> {
    if tape.model != Model::Ic || theta.model() != Model::Ic {
        return Err(invalid("realize_ic requires IC tape and IC parameters"));
    }
    if tape.values.len() != theta.values().len() {
        return Err(invalid("tape and parameter vector cover different edge sets"));
    }
    Ok(LiveEdgeSample {
        live: tape
            .values
            .iter()
            .zip(theta.values())
            .map(|(&r, &t)| r < t)
            .collect(),
    })
}

/// LT realization against a layout.
///
/// For node `v` with in-edges `e_1..e_m` in edge-id order, edge `e_i` is live
/// iff `r_v` falls in `[C_{i-1}, C_{i-1} + theta_{e_i})` where `C` are the
/// cumulative sums of the layout values. Requires `layout >= theta`
/// edge-wise; at most one in-edge per node comes out live.
pub fn realize_lt(
    g: &Graph,
    tape: &RandomTape,
    theta: &ParamVector,
    layout: &ParamVector,
) -> Result<LiveEdgeSample> {
    if tape.model != Model::Lt || theta.model() != Model::Lt || layout.model() != Model::Lt {
        return Err(invalid("realize_lt requires LT tape, parameters, and layout"));
    }
    if tape.values.len() != g.node_count() || theta.values().len() != g.edge_count() {
        return Err(invalid("tape or parameter vector does not match the graph"));
    }
    if !theta.dominated_by(layout, DOMINANCE_TOL) {
        return Err(invalid("layout must dominate the parameter vector edge-wise"));
    }
    let mut live = vec![false; g.edge_count()];
    for v in g.nodes() {
        let r = tape.values[v.index()];
        let mut cum = 0.0;
        for &e in g.in_edges(v) {
            if r >= cum && r < cum + theta.get(e) {
                live[e.index()] = true;
                break;
            }
            cum += layout.get(e);
        }
    }
    Ok(LiveEdgeSample { live })
}

/// Forward closure of `seeds` over live edges; includes the seeds.
pub fn reach(g: &Graph, live: &LiveEdgeSample, seeds: &SeedSet) -> Result<BTreeSet<NodeId>> {
    if live.live.len() != g.edge_count() {
        return Err(invalid("live-edge sample does not match the graph"));
    }
    g.check_seeds(seeds)?;
    let mut scratch = Scratch::new(g.node_count());
    let mut out = BTreeSet::new();
    closure_visit(g, seeds.as_slice(), &mut scratch, |e| live.is_live(e.id), |v| {
        out.insert(v);
    });
    Ok(out)
}

/// Round-by-round diffusion trace: `rounds[t]` is the active set after round
/// `t`, and `tau` is the quiescence round.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionTrace {
    pub rounds: Vec<SeedSet>,
    pub tau: usize,
}

impl DiffusionTrace {
    pub fn final_active(&self) -> &SeedSet {
        self.rounds.last().expect("trace has at least round 0")
    }
}

/// Runs the diffusion process explicitly, round by round.
///
/// IC spends `r_e` as the single activation attempt of `src` on edge `e`;
/// LT reads `r_v` as node `v`'s threshold. The trace stops at the first round
/// that activates nothing new.
pub fn simulate_rounds(
    g: &Graph,
    theta: &ParamVector,
    seeds: &SeedSet,
    tape: &RandomTape,
) -> Result<DiffusionTrace> {
    if tape.model != theta.model() {
        return Err(invalid("tape and parameter vector use different models"));
    }
    g.check_seeds(seeds)?;
    let n = g.node_count();
    let mut active = vec![false; n];
    for v in seeds.iter() {
        active[v.index()] = true;
    }
    let mut rounds = vec![seeds.clone()];
    let mut frontier: Vec<NodeId> = seeds.iter().collect();

    loop {
        let mut newly: Vec<NodeId> = Vec::new();
        match theta.model() {
            Model::Ic => {
                if tape.values.len() != g.edge_count() {
                    return Err(invalid("IC tape does not match the edge set"));
                }
                for &u in &frontier {
                    for &eid in g.out_edges(u) {
                        let e = g.edge(eid);
                        if !active[e.dst.index()] && tape.values[eid.index()] < theta.get(eid) {
                            active[e.dst.index()] = true;
                            newly.push(e.dst);
                        }
                    }
                }
            }
            Model::Lt => {
                if tape.values.len() != n {
                    return Err(invalid("LT tape does not match the node set"));
                }
                for v in g.nodes() {
                    if active[v.index()] {
                        continue;
                    }
                    let weight: f64 = g
                        .in_edges(v)
                        .iter()
                        .filter(|&&e| active[g.edge(e).src.index()])
                        .map(|&e| theta.get(e))
                        .sum();
                    if weight >= tape.values[v.index()] {
                        newly.push(v);
                    }
                }
                for &v in &newly {
                    active[v.index()] = true;
                }
            }
        }
        if newly.is_empty() {
            break;
        }
        let prev = rounds.last().unwrap();
        let next = SeedSet::from_nodes(prev.iter().chain(newly.iter().copied()));
        rounds.push(next);
        frontier = newly;
    }

    let tau = rounds.len() - 1;
    Ok(DiffusionTrace { rounds, tau })
}

/// Exact expected spread by enumerating live-edge outcomes.
///
/// IC instances may have at most [`MAX_EXACT_IC_FREE_EDGES`] edges with
/// probability strictly between 0 and 1; LT instances at most
/// [`MAX_EXACT_LT_CONFIGS`] live-edge configurations. Larger instances get a
/// capacity error and must use [`estimate_spread`].
pub fn exact_spread(g: &Graph, theta: &ParamVector, seeds: &SeedSet) -> Result<f64> {
    g.check_seeds(seeds)?;
    if theta.values().len() != g.edge_count() {
        return Err(invalid("parameter vector does not match the graph"));
    }
    match theta.model() {
        Model::Ic => exact_spread_ic(g, theta, seeds),
        Model::Lt => exact_spread_lt(g, theta, seeds),
    }
}

/// Checks whether the instance fits the exact-oracle capacity bounds without
/// running the enumeration.
pub fn exact_capacity(g: &Graph, theta: &ParamVector) -> Result<()> {
    if theta.values().len() != g.edge_count() {
        return Err(invalid("parameter vector does not match the graph"));
    }
    match theta.model() {
        Model::Ic => {
            let free = theta.values().iter().filter(|&&t| t > 0.0 && t < 1.0).count();
            if free > MAX_EXACT_IC_FREE_EDGES {
                return Err(capacity(format!(
                    "{free} free IC edges exceed the exact-oracle bound of {MAX_EXACT_IC_FREE_EDGES}"
                )));
            }
        }
        Model::Lt => {
            let mut configs: u64 = 1;
            for v in g.nodes() {
                let opts = g.in_edges(v).iter().filter(|&&e| theta.get(e) > 0.0).count();
                let sum: f64 = g.in_edges(v).iter().map(|&e| theta.get(e)).sum();
                let branches = opts + usize::from(sum < 1.0);
                configs = configs.saturating_mul(branches.max(1) as u64);
                if configs > MAX_EXACT_LT_CONFIGS {
                    return Err(capacity(format!(
                        "LT live-edge configurations exceed the exact-oracle bound of {MAX_EXACT_LT_CONFIGS}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn exact_spread_ic(g: &Graph, theta: &ParamVector, seeds: &SeedSet) -> Result<f64> {
    #[derive(Clone, Copy)]
    enum Status {
        Always,
        Never,
        Free(u32),
    }
    let mut status = Vec::with_capacity(g.edge_count());
    let mut free_probs = Vec::new();
    for e in g.edges() {
        let t = theta.get(e.id);
        if t >= 1.0 {
            status.push(Status::Always);
        } else if t <= 0.0 {
            status.push(Status::Never);
        } else {
            status.push(Status::Free(free_probs.len() as u32));
            free_probs.push(t);
        }
    }
    let f = free_probs.len();
    if f > MAX_EXACT_IC_FREE_EDGES {
        return Err(capacity(format!(
            "{f} free IC edges exceed the exact-oracle bound of {MAX_EXACT_IC_FREE_EDGES}"
        )));
    }

    let mut scratch = Scratch::new(g.node_count());
    let mut total = 0.0;
    for mask in 0u64..(1u64 << f) {
        let mut prob = 1.0;
        for (i, &p) in free_probs.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
        }
        if prob == 0.0 {
            continue;
        }
        let count = closure_count(g, seeds.as_slice(), &mut scratch, |e| {
            match status[e.id.index()] {
                Status::Always => true,
                Status::Never => false,
                Status::Free(slot) => mask >> slot & 1 == 1,
            }
        });
        total += prob * count as f64;
    }
    Ok(total)
}

fn exact_spread_lt(g: &Graph, theta: &ParamVector, seeds: &SeedSet) -> Result<f64> {
    let n = g.node_count();
    // Per node: the in-edges that can be chosen live, plus "no live in-edge".
    let mut options: Vec<Vec<(Option<EdgeId>, f64)>> = Vec::with_capacity(n);
    let mut configs: u64 = 1;
    for v in g.nodes() {
        let mut opts: Vec<(Option<EdgeId>, f64)> = Vec::new();
        let mut sum = 0.0;
        for &e in g.in_edges(v) {
            let t = theta.get(e);
            if t > 0.0 {
                opts.push((Some(e), t));
                sum += t;
            }
        }
        let none = 1.0 - sum;
        if none > 0.0 {
            opts.push((None, none));
        }
        configs = configs.saturating_mul(opts.len().max(1) as u64);
        if configs > MAX_EXACT_LT_CONFIGS {
            return Err(capacity(format!(
                "LT live-edge configurations exceed the exact-oracle bound of {MAX_EXACT_LT_CONFIGS}"
            )));
        }
        options.push(opts);
    }

    let mut chosen: Vec<Option<EdgeId>> = vec![None; n];
    let mut scratch = Scratch::new(n);
    let mut total = 0.0;
    #[allow(clippy::too_many_arguments)]
    fn descend(
        g: &Graph,
        seeds: &SeedSet,
        options: &[Vec<(Option<EdgeId>, f64)>],
        chosen: &mut Vec<Option<EdgeId>>,
        scratch: &mut Scratch,
        node: usize,
        prob: f64,
        total: &mut f64,
    ) {
        if node == options.len() {
            let count = closure_count(g, seeds.as_slice(), scratch, |e| {
                chosen[e.dst.index()] == Some(e.id)
            });
            *total += prob * count as f64;
            return;
        }
        if options[node].is_empty() {
            // No positive-probability option means no live in-edge.
            chosen[node] = None;
            descend(g, seeds, options, chosen, scratch, node + 1, prob, total);
            return;
        }
        for &(edge, p) in &options[node] {
            chosen[node] = edge;
            descend(g, seeds, options, chosen, scratch, node + 1, prob * p, total);
        }
        chosen[node] = None;
    }
    descend(
        g,
        seeds,
        &options,
        &mut chosen,
        &mut scratch,
        0,
        1.0,
        &mut total,
    );
    Ok(total)
}

/// Exact spread difference `spread(plus) - spread(minus)`; requires
/// edge-wise dominance `plus >= minus`.
pub fn exact_difference(
    g: &Graph,
    plus: &ParamVector,
    minus: &ParamVector,
    seeds: &SeedSet,
) -> Result<f64> {
    check_dominance(plus, minus)?;
    Ok(exact_spread(g, plus, seeds)? - exact_spread(g, minus, seeds)?)
}

fn check_dominance(plus: &ParamVector, minus: &ParamVector) -> Result<()> {
    if !minus.dominated_by(plus, DOMINANCE_TOL) {
        return Err(invalid(
            "upper parameter vector must dominate the lower one edge-wise",
        ));
    }
    Ok(())
}

/// Monte Carlo estimate: sample mean, standard error, and sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    fn from_sums(sum: u64, sumsq: u128, m: usize) -> Estimate {
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
}

/// Monte Carlo configuration. `parallelism` is a scheduling hint only: 1
/// forces a serial loop, anything else lets the global thread pool run the
/// samples. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub samples: usize,
    pub master_seed: u64,
    pub parallelism: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            samples: 2000,
            master_seed: 1,
            parallelism: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn new(samples: usize, master_seed: u64) -> Self {
        EstimatorConfig {
            samples,
            master_seed,
            parallelism: 0,
        }
    }
}

/// Estimates the expected spread of `seeds` under `theta` over
/// `cfg.samples` tapes. Deterministic given the inputs.
pub fn estimate_spread(
    g: &Graph,
    theta: &ParamVector,
    seeds: &SeedSet,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    g.check_seeds(seeds)?;
    if theta.values().len() != g.edge_count() {
        return Err(invalid("parameter vector does not match the graph"));
    }
    if cfg.samples == 0 {
        return Err(invalid("estimator needs at least one sample"));
    }
    let rule = LiveRule::for_params(g, theta);
    let (sum, sumsq) = sample_sums(g, cfg, |key, scratch| {
        closure_count(g, seeds.as_slice(), scratch, |e| rule.is_live(key, e)) as u64
    });
    Ok(Estimate::from_sums(sum, sumsq, cfg.samples))
}

/// Coupled estimate of `spread(plus) - spread(minus)`: each sample realizes
/// both parameter vectors from one tape (LT uses `plus` as the shared
/// layout), so every per-sample difference is nonnegative.
pub fn estimate_difference(
    g: &Graph,
    plus: &ParamVector,
    minus: &ParamVector,
    seeds: &SeedSet,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    g.check_seeds(seeds)?;
    check_dominance(plus, minus)?;
    if plus.values().len() != g.edge_count() {
        return Err(invalid("parameter vector does not match the graph"));
    }
    if cfg.samples == 0 {
        return Err(invalid("estimator needs at least one sample"));
    }
    let rule_plus = LiveRule::for_params(g, plus);
    let rule_minus = LiveRule::for_coupled(g, minus, plus);
    let (sum, sumsq) = sample_sums(g, cfg, |key, scratch| {
        let above = closure_count(g, seeds.as_slice(), scratch, |e| rule_plus.is_live(key, e));
        let below = closure_count(g, seeds.as_slice(), scratch, |e| rule_minus.is_live(key, e));
        debug_assert!(below <= above, "coupling must dominate sample-wise");
        (above - below) as u64
    });
    Ok(Estimate::from_sums(sum, sumsq, cfg.samples))
}

fn sample_sums(
    g: &Graph,
    cfg: &EstimatorConfig,
    per_sample: impl Fn(u64, &mut Scratch) -> u64 + Sync,
) -> (u64, u128) {
    let n = g.node_count();
    let master = cfg.master_seed;
    if cfg.parallelism == 1 {
        let mut scratch = Scratch::new(n);
        let mut sum = 0u64;
        let mut sumsq = 0u128;
        for i in 0..cfg.samples {
            let c = per_sample(tape_key(master, i as u64), &mut scratch);
            sum += c;
            sumsq += (c as u128) * (c as u128);
        }
        (sum, sumsq)
    } else {
        (0..cfg.samples)
            .into_par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, i| {
                    let c = per_sample(tape_key(master, i as u64), scratch);
                    (c, (c as u128) * (c as u128))
                },
            )
            .reduce(|| (0u64, 0u128), |a, b| (a.0 + b.0, a.1 + b.1))
    }
}

/// How an edge's liveness is decided from a tape key, without materializing
/// the tape. Entry `i` of the tape is `unit_f64(at(key, i))`, exactly as
/// [`draw_tape`] produces it, so this path and the materialized one agree
/// bit for bit.
pub(crate) enum LiveRule {
    Ic {
        theta: Vec<f64>,
    },
    /// LT liveness of edge `e`: `r_dst` in `[starts[e], starts[e] + theta[e])`.
    Lt {
        theta: Vec<f64>,
        starts: Vec<f64>,
    },
}

impl LiveRule {
    /// Rule realizing `theta` on its own (LT layout = theta).
    pub(crate) fn for_params(g: &Graph, theta: &ParamVector) -> LiveRule {
        match theta.model() {
            Model::Ic => LiveRule::Ic {
                theta: theta.values().to_vec(),
            },
            Model::Lt => LiveRule::Lt {
                theta: theta.values().to_vec(),
                starts: lt_interval_starts(g, theta),
            },
        }
    }

    /// Rule realizing `theta` inside the sub-interval layout of `layout`
    /// (requires `layout >= theta`; used for coupled realizations).
    pub(crate) fn for_coupled(g: &Graph, theta: &ParamVector, layout: &ParamVector) -> LiveRule {
        match theta.model() {
            Model::Ic => LiveRule::Ic {
                theta: theta.values().to_vec(),
            },
            Model::Lt => LiveRule::Lt {
                theta: theta.values().to_vec(),
                starts: lt_interval_starts(g, layout),
            },
        }
    }

    #[inline]
    pub(crate) fn is_live(&self, key: u64, e: &Edge) -> bool {
        match self {
            LiveRule::Ic { theta } => tape_uniform(key, e.id.0) < theta[e.id.index()],
            LiveRule::Lt { theta, starts } => {
                let r = tape_uniform(key, e.dst.0);
                let s = starts[e.id.index()];
                r >= s && r < s + theta[e.id.index()]
            }
        }
    }
}

/// Start offset of each edge's sub-interval of `[0, 1)` at node `dst`, under
/// the given layout: cumulative layout sums over earlier in-edges in edge-id
/// order.
pub(crate) fn lt_interval_starts(g: &Graph, layout: &ParamVector) -> Vec<f64> {
    let mut starts = vec![0.0; g.edge_count()];
    for v in g.nodes() {
        let mut cum = 0.0;
        for &e in g.in_edges(v) {
            starts[e.index()] = cum;
            cum += layout.get(e);
        }
    }
    starts
}

/// Word-packed visited set plus a DFS stack, reused across samples.
pub(crate) struct Scratch {
    visited: Vec<u64>,
    stack: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Scratch {
        Scratch {
            visited: vec![0; n.div_ceil(64)],
            stack: Vec::with_capacity(n.min(1024)),
        }
    }

    #[inline]
    fn clear(&mut self) {
        self.visited.fill(0);
        self.stack.clear();
    }

    #[inline]
    fn is_marked(&self, v: u32) -> bool {
        self.visited[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn mark(&mut self, v: u32) {
        self.visited[(v / 64) as usize] |= 1 << (v % 64);
    }
}

/// Closure size of `seeds` over edges accepted by `live`.
pub(crate) fn closure_count(
    g: &Graph,
    seeds: &[NodeId],
    scratch: &mut Scratch,
    live: impl FnMut(&Edge) -> bool,
) -> usize {
    let mut count = 0;
    closure_visit(g, seeds, scratch, live, |_| count += 1);
    count
}

fn closure_visit(
    g: &Graph,
    seeds: &[NodeId],
    scratch: &mut Scratch,
    mut live: impl FnMut(&Edge) -> bool,
    mut visit: impl FnMut(NodeId),
) {
    scratch.clear();
    for &s in seeds {
        if !scratch.is_marked(s.0) {
            scratch.mark(s.0);
            visit(s);
            scratch.stack.push(s.0);
        }
    }
    while let Some(u) = scratch.stack.pop() {
        for &eid in g.out_edges(NodeId(u)) {
            let e = g.edge(eid);
            if !scratch.is_marked(e.dst.0) && live(e) {
                scratch.mark(e.dst.0);
                visit(e.dst);
                scratch.stack.push(e.dst.0);
            }
        }
    }
}

/// Live adjacency frozen from one tape, for repeated evaluation inside
/// optimizers.
#[derive(Debug, Clone)]
pub(crate) struct LiveAdj {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl LiveAdj {
    pub(crate) fn realize(g: &Graph, rule: &LiveRule, key: u64) -> LiveAdj {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in g.nodes() {
            for &eid in g.out_edges(v) {
                let e = g.edge(eid);
                if rule.is_live(key, e) {
                    targets.push(e.dst.0);
                }
            }
            offsets.push(targets.len() as u32);
        }
        LiveAdj { offsets, targets }
    }

    #[inline]
    pub(crate) fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Marks everything reachable from `seeds` in `visited`, returning the
    /// number of nodes marked (nodes already marked are not recounted).
    pub(crate) fn activate(&self, seeds: &[NodeId], visited: &mut [u64], stack: &mut Vec<u32>) -> usize {
        stack.clear();
        let mut count = 0;
        for &s in seeds {
            if visited[(s.0 / 64) as usize] >> (s.0 % 64) & 1 == 0 {
                visited[(s.0 / 64) as usize] |= 1 << (s.0 % 64);
                count += 1;
                stack.push(s.0);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                if visited[(v / 64) as usize] >> (v % 64) & 1 == 0 {
                    visited[(v / 64) as usize] |= 1 << (v % 64);
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    }
}
