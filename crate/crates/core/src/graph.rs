//! Directed weighted graphs, edge-list ingestion, and per-edge parameters.
//!
//! Input multigraphs are collapsed to simple digraphs: parallel arcs between
//! the same ordered pair merge into one edge carrying a multiplicity count,
//! and self-loops are dropped (they never change reachability from a seed set
//! already containing the node). Edges are stored sorted by `(src, dst)` with
//! dense ids, so identical inputs always produce identical graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dense node index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

/// Dense edge index in `[0, |E|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Diffusion model a parameter vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ic,
    Lt,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Ic => write!(f, "ic"),
            Model::Lt => write!(f, "lt"),
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(Model::Ic),
            "lt" => Ok(Model::Lt),
            other => Err(invalid(format!("unknown model `{other}` (expected ic or lt)"))),
        }
    }
}

/// A collapsed directed edge. `multiplicity` counts the parallel arcs that
/// were merged into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub multiplicity: u32,
}

/// Simple weighted digraph with dense node and edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    labels: Option<Vec<String>>,
}

/// Counts reported by graph construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
}

impl Graph {
    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n as u32).map(NodeId)
    }

    /// Out-edge ids of `v`, ascending (hence sorted by destination).
    #[inline]
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_adj[v.index()]
    }

    /// In-edge ids of `v`, ascending.
    #[inline]
    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v.index()]
    }

    pub fn find_edge(&self, src: NodeId, dst: NodeId) -> Option<EdgeId> {
        self.edges
            .binary_search_by(|e| (e.src, e.dst).cmp(&(src, dst)))
            .ok()
            .map(|i| self.edges[i].id)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Printable name of a node: its label when the graph has labels, the
    /// numeric index otherwise.
    pub fn node_name(&self, v: NodeId) -> String {
        match &self.labels {
            Some(ls) => ls[v.index()].clone(),
            None => v.0.to_string(),
        }
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v.index() < self.n
    }

    pub(crate) fn check_seeds(&self, seeds: &SeedSet) -> Result<()> {
        match seeds.iter().find(|v| !self.contains_node(*v)) {
            Some(v) => Err(invalid(format!(
                "seed node {} out of range (n = {})",
                v.0, self.n
            ))),
            None => Ok(()),
        }
    }

    /// Serializes the graph in the edge-list format accepted by
    /// [`load_edge_list`]. Multiplicities are always written. The leading
    /// comment directives (`# nodes`, `# node`) let a reload reproduce the
    /// graph exactly, including isolated nodes and label numbering; other
    /// tools can ignore them as ordinary comments.
    pub fn dump_edge_list(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# nodes {}", self.n)?;
        if let Some(labels) = &self.labels {
            for label in labels {
                writeln!(w, "# node {label}")?;
            }
        }
        for e in &self.edges {
            writeln!(
                w,
                "{} {} {}",
                self.node_name(e.src),
                self.node_name(e.dst),
                e.multiplicity
            )?;
        }
        Ok(())
    }

    pub fn dump_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.dump_edge_list(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("edge list is utf-8")
    }
}

/// Builds a collapsed graph from raw arcs.
///
/// Repeated `(src, dst)` pairs merge by summing multiplicity; with
/// `undirected` set, every arc also contributes its reverse. Self-loops are
/// dropped and counted in the returned stats.
pub fn build_graph(
    n: usize,
    arcs: &[(u32, u32, u32)],
    undirected: bool,
) -> Result<(Graph, BuildStats)> {
    build_graph_labeled(n, arcs, undirected, None)
}

fn build_graph_labeled(
    n: usize,
    arcs: &[(u32, u32, u32)],
    undirected: bool,
    labels: Option<Vec<String>>,
) -> Result<(Graph, BuildStats)> {
    let labels = labels.map(|mut ls| {
        // A `# nodes` directive can declare isolated nodes beyond the label
        // manifest; give them their index as a display name.
        while ls.len() < n {
            ls.push(ls.len().to_string());
        }
        ls
    });
    let mut stats = BuildStats::default();
    let mut merged: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &(src, dst, mult) in arcs {
        if src as usize >= n || dst as usize >= n {
            return Err(invalid(format!(
                "edge endpoint ({src}, {dst}) out of range for n = {n}"
            )));
        }
        if mult == 0 {
            return Err(invalid(format!("edge ({src}, {dst}) has multiplicity 0")));
        }
        if src == dst {
            stats.self_loops_dropped += 1;
            continue;
        }
        let mut add = |a: u32, b: u32| -> Result<()> {
            let slot = merged.entry((a, b)).or_insert(0);
            *slot = slot
                .checked_add(mult)
                .ok_or_else(|| invalid(format!("multiplicity overflow on edge ({a}, {b})")))?;
            Ok(())
        };
        add(src, dst)?;
        if undirected {
            add(dst, src)?;
        }
    }

    let edges: Vec<Edge> = merged
        .into_iter()
        .enumerate()
        .map(|(i, ((src, dst), multiplicity))| Edge {
            id: EdgeId(i as u32),
            src: NodeId(src),
            dst: NodeId(dst),
            multiplicity,
        })
        .collect();

    let mut out_adj = vec![Vec::new(); n];
    let mut in_adj = vec![Vec::new(); n];
    for e in &edges {
        out_adj[e.src.index()].push(e.id);
        in_adj[e.dst.index()].push(e.id);
    }

    Ok((
        Graph {
            n,
            edges,
            out_adj,
            in_adj,
            labels,
        },
        stats,
    ))
}

/// Parses a whitespace-separated edge list.
///
/// Each non-comment line is `src dst [multiplicity]`; `#` starts a comment.
/// Node tokens are arbitrary labels mapped to dense ids in first-appearance
/// order. Two comment directives (written by [`Graph::dump_edge_list`]) are
/// recognized when present: `# nodes <n>` fixes the node count, and `# node
/// <label>` registers labels in id order. A file with a `# nodes` directive
/// and no label manifest is read in numeric mode, where tokens are the node
/// ids themselves.
pub fn load_edge_list(reader: impl BufRead, undirected: bool) -> Result<(Graph, BuildStats)> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }

    let mut declared_n: Option<usize> = None;
    let mut manifest: Vec<String> = Vec::new();
    for (lineno, raw) in lines.iter().enumerate() {
        let Some(rest) = raw.trim().strip_prefix('#') else {
            continue;
        };
        let mut toks = rest.split_whitespace();
        match toks.next() {
            Some("nodes") => {
                let val = toks.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: "`# nodes` directive missing a count".into(),
                })?;
                let count: usize = val.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("`# nodes` count `{val}` is not a number"),
                })?;
                declared_n = Some(count);
            }
            Some("node") => {
                let label = toks.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: "`# node` directive missing a label".into(),
                })?;
                manifest.push(label.to_string());
            }
            _ => {}
        }
    }

    let numeric_mode = declared_n.is_some() && manifest.is_empty();
    let mut label_ids: BTreeMap<String, u32> = manifest
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i as u32))
        .collect();
    if label_ids.len() != manifest.len() {
        return Err(invalid("duplicate label in `# node` manifest".to_string()));
    }
    let mut appearance: Vec<String> = manifest.clone();
    let manifest_only = !manifest.is_empty();

    let mut arcs: Vec<(u32, u32, u32)> = Vec::new();
    let mut max_numeric: u32 = 0;
    for (lineno, raw) in lines.iter().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw.as_str(),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!(
                    "expected `src dst [multiplicity]`, found {} fields",
                    tokens.len()
                ),
            });
        }
        let mut resolve = |tok: &str| -> Result<u32> {
            if numeric_mode {
                let id: u32 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("node token `{tok}` is not an id (numeric mode)"),
                })?;
                max_numeric = max_numeric.max(id);
                return Ok(id);
            }
            if let Some(&id) = label_ids.get(tok) {
                return Ok(id);
            }
            if manifest_only {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("node `{tok}` not declared in the `# node` manifest"),
                });
            }
            let id = appearance.len() as u32;
            appearance.push(tok.to_string());
            label_ids.insert(tok.to_string(), id);
            Ok(id)
        };
        let src = resolve(tokens[0])?;
        let dst = resolve(tokens[1])?;
        let mult: u32 = match tokens.get(2) {
            Some(tok) => tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("multiplicity `{tok}` is not a positive integer"),
            })?,
            None => 1,
        };
        if mult == 0 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "multiplicity must be at least 1".into(),
            });
        }
        arcs.push((src, dst, mult));
    }

    let (n, labels) = if numeric_mode {
        let declared = declared_n.unwrap_or(0);
        let observed = if arcs.is_empty() {
            0
        } else {
            max_numeric as usize + 1
        };
        if observed > declared {
            return Err(invalid(format!(
                "node id {} exceeds declared `# nodes {}`",
                max_numeric, declared
            )));
        }
        (declared, None)
    } else {
        let n = appearance.len().max(declared_n.unwrap_or(0));
        (n, Some(appearance))
    };

    build_graph_labeled(n, &arcs, undirected, labels)
}

pub fn load_edge_list_str(text: &str, undirected: bool) -> Result<(Graph, BuildStats)> {
    load_edge_list(std::io::Cursor::new(text), undirected)
}

/// Set of seed nodes, stored sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedSet {
    nodes: Vec<NodeId>,
}

impl SeedSet {
    pub fn empty() -> Self {
        SeedSet::default()
    }

    pub fn singleton(v: NodeId) -> Self {
        SeedSet { nodes: vec![v] }
    }

    /// All nodes `0..n`.
    pub fn full(n: usize) -> Self {
        SeedSet {
            nodes: (0..n as u32).map(NodeId).collect(),
        }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Self::from_nodes(ids.into_iter().map(NodeId))
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        SeedSet { nodes }
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        match self.nodes.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.nodes.insert(pos, v);
                true
            }
        }
    }

    /// A copy of the set with `v` added.
    pub fn with(&self, v: NodeId) -> Self {
        let mut next = self.clone();
        next.insert(v);
        next
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.nodes
    }
}

impl FromIterator<NodeId> for SeedSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        SeedSet::from_nodes(iter)
    }
}

/// Per-edge parameter vector: IC activation probabilities or LT weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    model: Model,
    values: Vec<f64>,
}

/// Slack for the LT per-node weight-sum constraint.
pub const LT_SUM_SLACK: f64 = 1e-9;

/// Counts reported by [`uniform_params`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParamStats {
    /// Edges whose probability was clamped at 1.
    pub clamped_edges: usize,
    /// Nodes whose LT in-weights were rescaled to sum to 1.
    pub rescaled_nodes: usize,
}

impl ParamVector {
    /// Validates values against the graph: everything in `[0, 1]`, and for
    /// the LT model each node's in-weights summing to at most 1 (within
    /// [`LT_SUM_SLACK`]).
    pub fn new(g: &Graph, model: Model, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(invalid(format!(
                "parameter vector has {} entries for {} edges",
                values.len(),
                g.edge_count()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("parameter {v} on edge {i} outside [0, 1]")));
            }
        }
        let pv = ParamVector { model, values };
        if model == Model::Lt {
            for v in g.nodes() {
                let sum = pv.in_sum(g, v);
                if sum > 1.0 + LT_SUM_SLACK {
                    return Err(invalid(format!(
                        "LT in-weights of node {} sum to {sum} > 1",
                        v.0
                    )));
                }
            }
        }
        Ok(pv)
    }

    #[inline]
    pub fn model(&self) -> Model {
        self.model
    }

    #[inline]
    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e.index()]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn in_sum(&self, g: &Graph, v: NodeId) -> f64 {
        g.in_edges(v).iter().map(|&e| self.get(e)).sum()
    }

    /// True when `self <= other` on every edge (within `tol`).
    pub fn dominated_by(&self, other: &ParamVector, tol: f64) -> bool {
        self.model == other.model
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| *a <= *b + tol)
    }
}

/// Assigns `min(1, multiplicity * base_p)` to every edge.
///
/// For the LT model, any node whose in-weights then exceed 1 has them
/// rescaled proportionally so they sum to exactly 1; the stats report how
/// many edges were clamped and nodes rescaled.
pub fn uniform_params(g: &Graph, base_p: f64, model: Model) -> Result<(ParamVector, ParamStats)> {
    if !(0.0..=1.0).contains(&base_p) {
        return Err(invalid(format!("base probability {base_p} outside [0, 1]")));
    }
    let mut stats = ParamStats::default();
    let mut values: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| {
            let raw = e.multiplicity as f64 * base_p;
            if raw > 1.0 {
                stats.clamped_edges += 1;
                1.0
            } else {
                raw
            }
        })
        .collect();
    if model == Model::Lt {
        for v in g.nodes() {
            let sum: f64 = g.in_edges(v).iter().map(|&e| values[e.index()]).sum();
            if sum > 1.0 {
                for &e in g.in_edges(v) {
                    values[e.index()] /= sum;
                }
                stats.rescaled_nodes += 1;
            }
        }
    }
    Ok((ParamVector::new(g, model, values)?, stats))
}
