//! Adversarial perturbation model: per-edge parameter intervals.
//!
//! An adversary may move every edge parameter independently inside its
//! interval. Because the spread is monotone in the parameters, the extremes
//! of interest are the two vectors taking every upper (`theta_plus`) or every
//! lower (`theta_minus`) endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{EdgeId, Graph, Model, ParamVector, LT_SUM_SLACK};

/// Which interval endpoint to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Upper,
    Lower,
}

/// Per-edge intervals `[lower_e, upper_e] ⊆ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyModel {
    model: Model,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Counts reported by [`relative_intervals`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntervalStats {
    /// Nodes whose LT upper bounds were scaled down to keep in-sums <= 1.
    pub rescaled_nodes: usize,
}

impl UncertaintyModel {
    /// Validates `0 <= lower <= upper <= 1` per edge, and for LT that each
    /// node's upper bounds sum to at most 1.
    pub fn new(g: &Graph, model: Model, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != g.edge_count() || upper.len() != g.edge_count() {
            return Err(invalid(format!(
                "interval vectors have {}/{} entries for {} edges",
                lower.len(),
                upper.len(),
                g.edge_count()
            )));
        }
        for i in 0..lower.len() {
            let (lo, hi) = (lower[i], upper[i]);
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(invalid(format!(
                    "interval [{lo}, {hi}] on edge {i} is not inside [0, 1]"
                )));
            }
        }
        if model == Model::Lt {
            for v in g.nodes() {
                let sum: f64 = g.in_edges(v).iter().map(|&e| upper[e.index()]).sum();
                if sum > 1.0 + LT_SUM_SLACK {
                    return Err(invalid(format!(
                        "LT upper bounds of node {} sum to {sum} > 1",
                        v.0
                    )));
                }
            }
        }
        Ok(UncertaintyModel { model, lower, upper })
    }

    #[inline]
    pub fn model(&self) -> Model {
        self.model
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.lower.len()
    }

    #[inline]
    pub fn interval(&self, e: EdgeId) -> (f64, f64) {
        (self.lower[e.index()], self.upper[e.index()])
    }
}

/// Builds intervals `[(1-delta)·theta_e, (1+delta)·theta_e]`, clamped to
/// `[0, 1]`.
///
/// For the LT model, any node whose upper bounds would sum past 1 has them
/// scaled down uniformly so the sum is exactly 1; the stats report how many
/// nodes were repaired. Note the repair can place an upper bound below the
/// observed parameter.
pub fn relative_intervals(
    g: &Graph,
    theta: &ParamVector,
    delta: f64,
) -> Result<(UncertaintyModel, IntervalStats)> {
    if delta < 0.0 {
        return Err(invalid(format!("relative perturbation {delta} is negative")));
    }
    let mut stats = IntervalStats::default();
    let lower: Vec<f64> = theta
        .values()
        .iter()
        .map(|&t| ((1.0 - delta) * t).max(0.0))
        .collect();
    let mut upper: Vec<f64> = theta
        .values()
        .iter()
        .map(|&t| ((1.0 + delta) * t).min(1.0))
        .collect();
    if theta.model() == Model::Lt {
        for v in g.nodes() {
            let sum: f64 = g.in_edges(v).iter().map(|&e| upper[e.index()]).sum();
            if sum > 1.0 {
                for &e in g.in_edges(v) {
                    upper[e.index()] /= sum;
                }
                stats.rescaled_nodes += 1;
            }
        }
    }
    Ok((UncertaintyModel::new(g, theta.model(), lower, upper)?, stats))
}

/// Extracts the extremal parameter vector taking every interval endpoint in
/// the given direction.
pub fn extreme_params(g: &Graph, u: &UncertaintyModel, direction: Direction) -> ParamVector {
    let values = match direction {
        Direction::Upper => u.upper.clone(),
        Direction::Lower => u.lower.clone(),
    };
    ParamVector::new(g, u.model, values).expect("interval invariants imply parameter invariants")
}

/// True when every parameter lies inside its interval.
pub fn contains(u: &UncertaintyModel, theta: &ParamVector) -> Result<bool> {
    if theta.values().len() != u.edge_count() || theta.model() != u.model {
        return Err(invalid("parameter vector does not match the interval edge set"));
    }
    Ok(theta
        .values()
        .iter()
        .enumerate()
        .all(|(i, &t)| u.lower[i] <= t && t <= u.upper[i]))
}
