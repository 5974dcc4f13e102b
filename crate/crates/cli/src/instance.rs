//! Text format for diffusion instances with per-edge uncertainty.
//!
//! A superset of the plain edge-list format: an edge line is either
//! `src dst [mult]` or `src dst mult lower upper`, where `lower upper` is the
//! edge's parameter interval. The comment directives `# nodes <n>` /
//! `# node <label>` work exactly as in the plain loader, and `# model <ic|lt>`
//! records the diffusion model. This is what `fixture` emits and what
//! `diff-maximize` and `oracle delta` read from a pipe.

use std::io::BufRead;

use imstab::error::{Error, Result};
use imstab::graph::{build_graph, Graph, Model, NodeId};
use imstab::uncertainty::UncertaintyModel;

/// A parsed instance: the graph, an optional interval model, and optional
/// node display labels.
#[derive(Debug)]
pub struct Instance {
    pub graph: Graph,
    pub model: Model,
    pub intervals: Option<UncertaintyModel>,
    pub labels: Option<Vec<String>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn load_instance(reader: impl BufRead) -> Result<Instance> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }

    let mut declared_n: Option<usize> = None;
    let mut manifest: Vec<String> = Vec::new();
    let mut model = Model::Ic;
    for (idx, raw) in lines.iter().enumerate() {
        let Some(rest) = raw.trim().strip_prefix('#') else {
            continue;
        };
        let mut toks = rest.split_whitespace();
        match toks.next() {
            Some("nodes") => {
                let val = toks
                    .next()
                    .ok_or_else(|| parse_err(idx + 1, "`# nodes` directive missing a count"))?;
                declared_n = Some(val.parse().map_err(|_| {
                    parse_err(idx + 1, format!("`# nodes` count `{val}` is not a number"))
                })?);
            }
            Some("node") => {
                let label = toks
                    .next()
                    .ok_or_else(|| parse_err(idx + 1, "`# node` directive missing a label"))?;
                manifest.push(label.to_string());
            }
            Some("model") => {
                let val = toks
                    .next()
                    .ok_or_else(|| parse_err(idx + 1, "`# model` directive missing a value"))?;
                model = val.parse()?;
            }
            _ => {}
        }
    }

    let numeric_mode = declared_n.is_some() && manifest.is_empty();
    let manifest_only = !manifest.is_empty();
    let mut label_ids: std::collections::BTreeMap<String, u32> = manifest
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i as u32))
        .collect();
    let mut appearance = manifest.clone();

    struct Row {
        src: u32,
        dst: u32,
        mult: u32,
        interval: Option<(f64, f64)>,
        line: usize,
    }
    let mut rows: Vec<Row> = Vec::new();
    for (idx, raw) in lines.iter().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw.as_str(),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !matches!(tokens.len(), 2 | 3 | 5) {
            return Err(parse_err(
                idx + 1,
                format!(
                    "expected `src dst [mult]` or `src dst mult lower upper`, found {} fields",
                    tokens.len()
                ),
            ));
        }
        let mut resolve = |tok: &str| -> Result<u32> {
            if numeric_mode {
                return tok
                    .parse()
                    .map_err(|_| parse_err(idx + 1, format!("node token `{tok}` is not an id")));
            }
            if let Some(&id) = label_ids.get(tok) {
                return Ok(id);
            }
            if manifest_only {
                return Err(parse_err(
                    idx + 1,
                    format!("node `{tok}` not declared in the `# node` manifest"),
                ));
            }
            let id = appearance.len() as u32;
            appearance.push(tok.to_string());
            label_ids.insert(tok.to_string(), id);
            Ok(id)
        };
        let src = resolve(tokens[0])?;
        let dst = resolve(tokens[1])?;
        let mult: u32 = match tokens.get(2) {
            Some(tok) => tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("multiplicity `{tok}` is not a number")))?,
            None => 1,
        };
        let interval = if tokens.len() == 5 {
            let lo: f64 = tokens[3]
                .parse()
                .map_err(|_| parse_err(idx + 1, "lower bound is not a number"))?;
            let hi: f64 = tokens[4]
                .parse()
                .map_err(|_| parse_err(idx + 1, "upper bound is not a number"))?;
            Some((lo, hi))
        } else {
            None
        };
        rows.push(Row {
            src,
            dst,
            mult,
            interval,
            line: idx + 1,
        });
    }

    let has_intervals = rows.iter().any(|r| r.interval.is_some());
    if has_intervals {
        if let Some(r) = rows.iter().find(|r| r.interval.is_none()) {
            return Err(parse_err(
                r.line,
                "mixed edge lines: all rows need intervals once any row has them",
            ));
        }
    }

    let n = if numeric_mode {
        declared_n.unwrap_or(0)
    } else {
        appearance.len().max(declared_n.unwrap_or(0))
    };
    let arcs: Vec<(u32, u32, u32)> = rows.iter().map(|r| (r.src, r.dst, r.mult)).collect();
    let (graph, _) = build_graph(n, &arcs, false)?;

    let intervals = if has_intervals {
        let mut lower = vec![f64::NAN; graph.edge_count()];
        let mut upper = vec![f64::NAN; graph.edge_count()];
        for r in &rows {
            let (lo, hi) = r.interval.unwrap();
            let e = graph
                .find_edge(NodeId(r.src), NodeId(r.dst))
                .ok_or_else(|| parse_err(r.line, "edge vanished during collapse (self-loop?)"))?;
            if !lower[e.index()].is_nan() && (lower[e.index()], upper[e.index()]) != (lo, hi) {
                return Err(parse_err(
                    r.line,
                    "conflicting intervals for a repeated edge",
                ));
            }
            lower[e.index()] = lo;
            upper[e.index()] = hi;
        }
        Some(UncertaintyModel::new(&graph, model, lower, upper)?)
    } else {
        None
    };

    Ok(Instance {
        graph,
        model,
        intervals,
        labels: if numeric_mode || appearance.is_empty() {
            None
        } else {
            Some(appearance)
        },
    })
}

pub fn load_instance_str(text: &str) -> Result<Instance> {
    load_instance(std::io::Cursor::new(text))
}

/// Serializes an instance in the format [`load_instance`] reads.
pub fn dump_instance(
    graph: &Graph,
    model: Model,
    intervals: &UncertaintyModel,
    labels: Option<&[String]>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# nodes {}\n", graph.node_count()));
    if let Some(labels) = labels {
        for label in labels {
            out.push_str(&format!("# node {label}\n"));
        }
    }
    out.push_str(&format!("# model {model}\n"));
    let name = |v: NodeId| match labels {
        Some(ls) => ls[v.index()].clone(),
        None => v.0.to_string(),
    };
    for e in graph.edges() {
        let (lo, hi) = intervals.interval(e.id);
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            name(e.src),
            name(e.dst),
            e.multiplicity,
            lo,
            hi
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_edge_lists_still_parse() {
        let inst = load_instance_str("a b\nb c 2\n").unwrap();
        assert_eq!(inst.graph.node_count(), 3);
        assert!(inst.intervals.is_none());
        assert_eq!(inst.labels.as_deref().unwrap(), &["a", "b", "c"]);
    }

    #[test]
    fn interval_lines_round_trip() {
        let text = "# nodes 4\n# node u\n# node v\n# node x\n# node y\n# model ic\n\
                    u v 1 0 1\nv x 1 1 1\nx y 1 1 1\n";
        let inst = load_instance_str(text).unwrap();
        let u = inst.intervals.clone().unwrap();
        assert_eq!(inst.graph.edge_count(), 3);
        let e_uv = inst.graph.find_edge(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(u.interval(e_uv), (0.0, 1.0));
        let dumped = dump_instance(&inst.graph, inst.model, &u, inst.labels.as_deref());
        let again = load_instance_str(&dumped).unwrap();
        assert_eq!(again.graph, inst.graph);
        assert_eq!(again.intervals.unwrap(), u);
    }

    #[test]
    fn mixed_rows_are_rejected() {
        let err = load_instance_str("a b 1 0 1\nb c\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
