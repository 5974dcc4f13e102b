//! Experiment runners: the single-seed clique instability table, the
//! maximization-vs-difference comparison sweep, and the regular-graph degree
//! sweep. All runners emit fixed-schema CSV and are reproducible bit for bit
//! from their configuration and master seed (apart from the wall-time
//! column, which reports real elapsed seconds).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use imstab::diffusion::{estimate_spread, Estimate, EstimatorConfig};
use imstab::error::{Error, Result};
use imstab::graph::{load_edge_list, uniform_params, Model, NodeId, ParamVector, SeedSet};
use imstab::netgen::{clique, random_regular, GenSpec};
use imstab::optimize::{
    greedy, lazy_greedy, random_greedy, random_greedy_lazy, GreedyReport, Objective, SaaDifference,
    SaaSpread,
};
use imstab::rng;
use imstab::uncertainty::{extreme_params, relative_intervals, Direction};
use imstab::Graph;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Where an experiment's network comes from: a generator family or an
/// edge-list file. The generator seed may be left open, in which case it is
/// derived from the experiment's master seed.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSpec {
    Grid { rows: usize, cols: usize },
    Regular { n: usize, d: usize, seed: Option<u64> },
    SmallWorld { n: usize, side: usize, beta: f64, seed: Option<u64> },
    PrefAttach { n: usize, m: usize, seed: Option<u64> },
    Clique { n: usize },
    TwoCliques { n: usize },
    File { path: PathBuf, undirected: bool },
}

impl NetworkSpec {
    /// Builds the graph, deriving any open generator seed from
    /// `master_seed`, and returns it with its display id.
    pub fn resolve(&self, master_seed: u64) -> Result<(Graph, String)> {
        let derived = rng::derive(master_seed, rng::domain::NETGEN);
        let spec = match *self {
            NetworkSpec::Grid { rows, cols } => GenSpec::Grid2d { rows, cols },
            NetworkSpec::Regular { n, d, seed } => GenSpec::RandomRegular {
                n,
                degree: d,
                seed: seed.unwrap_or(derived),
            },
            NetworkSpec::SmallWorld { n, side, beta, seed } => GenSpec::SmallWorld {
                n,
                side,
                beta,
                seed: seed.unwrap_or(derived),
            },
            NetworkSpec::PrefAttach { n, m, seed } => GenSpec::PrefAttach {
                n,
                m,
                seed: seed.unwrap_or(derived),
            },
            NetworkSpec::Clique { n } => GenSpec::Clique { n },
            NetworkSpec::TwoCliques { n } => GenSpec::TwoCliques { n },
            NetworkSpec::File { ref path, undirected } => {
                let file = std::fs::File::open(path)?;
                let (g, _) = load_edge_list(std::io::BufReader::new(file), undirected)?;
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "file".into());
                return Ok((g, id));
            }
        };
        Ok((spec.generate()?, spec.id()))
    }
}

impl FromStr for NetworkSpec {
    type Err = Error;

    /// Grammar: `family:key=value,...`, e.g. `grid:rows=20,cols=20`,
    /// `regular:n=400,d=10`, `smallworld:n=400,side=5,beta=0.1`,
    /// `prefattach:n=400,m=5`, `clique:n=200`, `two-cliques:n=100`,
    /// `file:path.el`, `ufile:path.el` (undirected interpretation).
    /// A generator may carry `seed=<u64>`; otherwise the master seed is used.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        if family == "file" || family == "ufile" {
            if rest.is_empty() {
                return Err(invalid("file network needs a path: file:<path>"));
            }
            return Ok(NetworkSpec::File {
                path: PathBuf::from(rest),
                undirected: family == "ufile",
            });
        }
        type Params = std::collections::BTreeMap<String, String>;
        let mut kv: Params = Params::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value in network spec: `{part}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn take_num(kv: &mut Params, key: &str) -> Result<Option<u64>> {
            kv.remove(key)
                .map(|v| {
                    v.parse::<u64>()
                        .map_err(|_| invalid(format!("network parameter {key}={v} is not a number")))
                })
                .transpose()
        }
        fn require(kv: &mut Params, key: &str) -> Result<u64> {
            kv.remove(key)
                .ok_or_else(|| invalid(format!("network spec is missing `{key}=`")))?
                .parse::<u64>()
                .map_err(|_| invalid(format!("network parameter `{key}` is not a number")))
        }
        let spec = match family {
            "grid" => NetworkSpec::Grid {
                rows: require(&mut kv, "rows")? as usize,
                cols: require(&mut kv, "cols")? as usize,
            },
            "regular" => NetworkSpec::Regular {
                n: require(&mut kv, "n")? as usize,
                d: require(&mut kv, "d")? as usize,
                seed: take_num(&mut kv, "seed")?,
            },
            "smallworld" => {
                let beta = kv
                    .remove("beta")
                    .ok_or_else(|| invalid("network spec is missing `beta=`"))?
                    .parse::<f64>()
                    .map_err(|_| invalid("network parameter `beta` is not a number"))?;
                NetworkSpec::SmallWorld {
                    n: require(&mut kv, "n")? as usize,
                    side: require(&mut kv, "side")? as usize,
                    beta,
                    seed: take_num(&mut kv, "seed")?,
                }
            }
            "prefattach" => NetworkSpec::PrefAttach {
                n: require(&mut kv, "n")? as usize,
                m: require(&mut kv, "m")? as usize,
                seed: take_num(&mut kv, "seed")?,
            },
            "clique" => NetworkSpec::Clique {
                n: require(&mut kv, "n")? as usize,
            },
            "two-cliques" => NetworkSpec::TwoCliques {
                n: require(&mut kv, "n")? as usize,
            },
            other => {
                return Err(invalid(format!(
                    "unknown network family `{other}` (grid, regular, smallworld, prefattach, \
                     clique, two-cliques, file, ufile)"
                )))
            }
        };
        if let Some(extra) = kv.keys().next() {
            return Err(invalid(format!("unknown network parameter `{extra}`")));
        }
        Ok(spec)
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSpec::Grid { rows, cols } => write!(f, "grid:rows={rows},cols={cols}"),
            NetworkSpec::Regular { n, d, seed } => {
                write!(f, "regular:n={n},d={d}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            NetworkSpec::SmallWorld { n, side, beta, seed } => {
                write!(f, "smallworld:n={n},side={side},beta={beta}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            NetworkSpec::PrefAttach { n, m, seed } => {
                write!(f, "prefattach:n={n},m={m}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            NetworkSpec::Clique { n } => write!(f, "clique:n={n}"),
            NetworkSpec::TwoCliques { n } => write!(f, "two-cliques:n={n}"),
            NetworkSpec::File { path, undirected } => {
                write!(f, "{}:{}", if *undirected { "ufile" } else { "file" }, path.display())
            }
        }
    }
}

/// Full configuration of a comparison run. Serialized as flat JSON; CLI
/// flags override file values field by field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Network spec string, e.g. `smallworld:n=400,side=5,beta=0.1`.
    pub network: String,
    pub model: Model,
    /// Base probabilities to sweep.
    pub base_p: Vec<f64>,
    /// Relative perturbation levels to sweep.
    pub delta: Vec<f64>,
    /// Seeds to select.
    pub k: usize,
    /// Monte Carlo samples per estimate.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// Use the lazy (CELF) greedy variants.
    #[serde(default)]
    pub celf: bool,
    /// Output CSV path; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Sampling threads (0 = all cores, 1 = serial). Scheduling hint only.
    #[serde(default)]
    pub parallelism: usize,
}

fn default_samples() -> usize {
    2000
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_p.is_empty() || self.delta.is_empty() {
            return Err(invalid("base_p and delta lists must be non-empty"));
        }
        if self.k == 0 || self.samples == 0 {
            return Err(invalid("k and samples must be at least 1"));
        }
        Ok(())
    }
}

/// One row of a comparison run.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub network: String,
    pub p: f64,
    pub delta: f64,
    pub k: usize,
    pub samples: usize,
    pub im_value: f64,
    pub im_stderr: f64,
    pub idm_value: f64,
    pub idm_stderr: f64,
    /// `None` flags a degenerate ratio (maximization value indistinguishable
    /// from zero at three standard errors).
    pub ratio: Option<f64>,
    pub seconds: f64,
}

pub const REPORT_CSV_HEADER: &str =
    "network,p,delta,k,M,im_value,im_stderr,idm_value,idm_stderr,ratio,seconds";

pub fn report_rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let ratio = match r.ratio {
            Some(x) => format!("{x:.6}"),
            None => "NA".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{:.3}\n",
            r.network,
            r.p,
            r.delta,
            r.k,
            r.samples,
            r.im_value,
            r.im_stderr,
            r.idm_value,
            r.idm_stderr,
            ratio,
            r.seconds
        ));
    }
    out
}

fn ratio_of(im: &Estimate, idm: &Estimate) -> Option<f64> {
    if im.mean <= 3.0 * im.stderr {
        None
    } else {
        Some(idm.mean / im.mean)
    }
}

/// Maximizes the spread objective and re-estimates the chosen set.
fn maximize_spread(
    g: &Graph,
    theta: &ParamVector,
    k: usize,
    est: &EstimatorConfig,
    celf: bool,
) -> Result<(GreedyReport, Estimate)> {
    let obj = SaaSpread::new(g, theta, est)?;
    let report = if celf { lazy_greedy(&obj, k)? } else { greedy(&obj, k)? };
    let estimate = obj.estimate(&report.selected);
    Ok((report, estimate))
}

/// Maximizes the coupled spread difference and re-estimates the chosen set.
fn maximize_difference(
    g: &Graph,
    plus: &ParamVector,
    minus: &ParamVector,
    k: usize,
    est: &EstimatorConfig,
    greedy_seed: u64,
    celf: bool,
) -> Result<(GreedyReport, Estimate)> {
    let obj = SaaDifference::new(g, plus, minus, est)?;
    let report = if celf {
        random_greedy_lazy(&obj, k, greedy_seed)?
    } else {
        random_greedy(&obj, k, greedy_seed)?
    };
    let estimate = obj.estimate(&report.selected);
    Ok((report, estimate))
}

/// Runs the (p, delta) comparison sweep on one network: for each base
/// probability, the maximization value via greedy on the sampled spread, and
/// for each perturbation level the difference value via Random Greedy on the
/// coupled sampled difference.
///
/// Tapes are keyed by (master seed, p) but not by delta, so rows within one
/// p share their Monte Carlo randomness and differ only through the
/// intervals; together with the coupled realizations this makes the
/// difference values comparable across delta at the sample level.
pub fn run_comparison(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let network: NetworkSpec = cfg.network.parse()?;
    let (g, network_id) = network.resolve(cfg.master_seed)?;
    let mut rows = Vec::with_capacity(cfg.base_p.len() * cfg.delta.len());
    for (pi, &p) in cfg.base_p.iter().enumerate() {
        let started_p = Instant::now();
        let (theta, pstats) = uniform_params(&g, p, cfg.model)?;
        if pstats.clamped_edges > 0 || pstats.rescaled_nodes > 0 {
            eprintln!(
                "note: p={p}: clamped {} edges, rescaled {} nodes to keep parameters feasible",
                pstats.clamped_edges, pstats.rescaled_nodes
            );
        }
        let est = EstimatorConfig {
            samples: cfg.samples,
            master_seed: rng::derive(cfg.master_seed, pi as u64),
            parallelism: cfg.parallelism,
        };
        let (_, im) = maximize_spread(&g, &theta, cfg.k, &est, cfg.celf)?;
        let im_seconds = started_p.elapsed().as_secs_f64();
        for (di, &delta) in cfg.delta.iter().enumerate() {
            let started = Instant::now();
            let (intervals, istats) = relative_intervals(&g, &theta, delta)?;
            if istats.rescaled_nodes > 0 {
                eprintln!(
                    "note: p={p} delta={delta}: scaled upper bounds down on {} nodes",
                    istats.rescaled_nodes
                );
            }
            let plus = extreme_params(&g, &intervals, Direction::Upper);
            let minus = extreme_params(&g, &intervals, Direction::Lower);
            let greedy_seed = rng::derive(cfg.master_seed, 10_000 + (pi * 100 + di) as u64);
            let (_, idm) =
                maximize_difference(&g, &plus, &minus, cfg.k, &est, greedy_seed, cfg.celf)?;
            rows.push(ReportRow {
                network: network_id.clone(),
                p,
                delta,
                k: cfg.k,
                samples: cfg.samples,
                im_value: im.mean,
                im_stderr: im.stderr,
                idm_value: idm.mean,
                idm_stderr: idm.stderr,
                ratio: ratio_of(&im, &idm),
                seconds: im_seconds / cfg.delta.len() as f64 + started.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// One row of the clique instability table.
#[derive(Debug, Clone, Serialize)]
pub struct CliqueRow {
    pub delta: f64,
    pub sigma_plus: f64,
    pub sigma_plus_stderr: f64,
    pub sigma_minus: f64,
    pub sigma_minus_stderr: f64,
}

pub const CLIQUE_CSV_HEADER: &str =
    "delta,sigma_plus,sigma_plus_stderr,sigma_minus,sigma_minus_stderr";

pub fn clique_rows_to_csv(rows: &[CliqueRow]) -> String {
    let mut out = String::from(CLIQUE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            r.delta, r.sigma_plus, r.sigma_plus_stderr, r.sigma_minus, r.sigma_minus_stderr
        ));
    }
    out
}

/// Single-seed instability on the complete graph: every edge gets
/// probability `1/n`, and for each perturbation level the spread of one seed
/// (all seeds are exchangeable) is estimated under both extremal vectors.
pub fn run_clique_table(
    n: usize,
    deltas: &[f64],
    samples: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<Vec<CliqueRow>> {
    if deltas.is_empty() {
        return Err(invalid("delta list must be non-empty"));
    }
    let g = clique(n)?;
    let (theta, _) = uniform_params(&g, 1.0 / n as f64, Model::Ic)?;
    let seed_set = SeedSet::singleton(NodeId(0));
    let est = EstimatorConfig {
        samples,
        master_seed,
        parallelism,
    };
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let (intervals, _) = relative_intervals(&g, &theta, delta)?;
        let plus = extreme_params(&g, &intervals, Direction::Upper);
        let minus = extreme_params(&g, &intervals, Direction::Lower);
        let hi = estimate_spread(&g, &plus, &seed_set, &est)?;
        let lo = estimate_spread(&g, &minus, &seed_set, &est)?;
        rows.push(CliqueRow {
            delta,
            sigma_plus: hi.mean,
            sigma_plus_stderr: hi.stderr,
            sigma_minus: lo.mean,
            sigma_minus_stderr: lo.stderr,
        });
    }
    Ok(rows)
}

/// Degree sweep on random regular graphs: base probability `(1+alpha)/d`
/// for each degree and calibration offset, comparison rows per delta.
#[allow(clippy::too_many_arguments)]
pub fn run_regular_sweep(
    degrees: &[usize],
    alphas: &[f64],
    n: usize,
    deltas: &[f64],
    k: usize,
    samples: usize,
    master_seed: u64,
    celf: bool,
    parallelism: usize,
) -> Result<Vec<ReportRow>> {
    if degrees.is_empty() || alphas.is_empty() || deltas.is_empty() {
        return Err(invalid("degrees, alphas, and deltas must be non-empty"));
    }
    let mut rows = Vec::new();
    for (gi, &d) in degrees.iter().enumerate() {
        let graph_seed = rng::derive(rng::derive(master_seed, rng::domain::NETGEN), gi as u64);
        let g = random_regular(n, d, graph_seed)?;
        for (ai, &alpha) in alphas.iter().enumerate() {
            let started_p = Instant::now();
            let p = (1.0 + alpha) / d as f64;
            let (theta, _) = uniform_params(&g, p, Model::Ic)?;
            let est = EstimatorConfig {
                samples,
                master_seed: rng::derive(master_seed, (gi * 100 + ai) as u64),
                parallelism,
            };
            let (_, im) = maximize_spread(&g, &theta, k, &est, celf)?;
            let im_seconds = started_p.elapsed().as_secs_f64();
            for (di, &delta) in deltas.iter().enumerate() {
                let started = Instant::now();
                let (intervals, _) = relative_intervals(&g, &theta, delta)?;
                let plus = extreme_params(&g, &intervals, Direction::Upper);
                let minus = extreme_params(&g, &intervals, Direction::Lower);
                let greedy_seed = rng::derive(
                    master_seed,
                    20_000 + (gi * 10_000 + ai * 100 + di) as u64,
                );
                let (_, idm) = maximize_difference(&g, &plus, &minus, k, &est, greedy_seed, celf)?;
                rows.push(ReportRow {
                    network: format!("regular-n{n}-d{d}-alpha{alpha}"),
                    p,
                    delta,
                    k,
                    samples,
                    im_value: im.mean,
                    im_stderr: im.stderr,
                    idm_value: idm.mean,
                    idm_stderr: idm.stderr,
                    ratio: ratio_of(&im, &idm),
                    seconds: im_seconds / deltas.len() as f64 + started.elapsed().as_secs_f64(),
                });
            }
        }
    }
    Ok(rows)
}

/// Maximizes an objective over an explicit instance, used by the `maximize`
/// and `diff-maximize` subcommands once the objective is built.
pub fn run_selection(
    obj: &dyn Objective,
    k: usize,
    greedy_seed: u64,
    celf: bool,
    random: bool,
) -> Result<GreedyReport> {
    match (random, celf) {
        (true, false) => random_greedy(obj, k, greedy_seed),
        (true, true) => random_greedy_lazy(obj, k, greedy_seed),
        (false, false) => greedy(obj, k),
        (false, true) => lazy_greedy(obj, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn network_specs_parse_and_round_trip() {
        let cases = [
            "grid:rows=20,cols=20",
            "regular:n=400,d=10",
            "regular:n=400,d=10,seed=7",
            "smallworld:n=400,side=5,beta=0.1",
            "prefattach:n=400,m=5",
            "clique:n=200",
            "two-cliques:n=100",
            "file:data/net.el",
        ];
        for s in cases {
            let spec: NetworkSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("regular:n=400".parse::<NetworkSpec>().is_err());
        assert!("blob:n=4".parse::<NetworkSpec>().is_err());
        assert!("regular:n=400,d=10,bogus=1".parse::<NetworkSpec>().is_err());
    }

    #[test]
    fn config_json_round_trips_with_defaults() {
        let json = r#"{
            "network": "two-cliques:n=5",
            "model": "ic",
            "base_p": [0.1],
            "delta": [0.0, 0.5],
            "k": 2
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.samples, 2000);
        assert_eq!(cfg.master_seed, 1);
        assert!(!cfg.celf);
        cfg.validate().unwrap();
    }

    #[test]
    fn zero_delta_rows_have_zero_difference() {
        let cfg = ExperimentConfig {
            network: "two-cliques:n=5".into(),
            model: Model::Ic,
            base_p: vec![0.1],
            delta: vec![0.0],
            k: 2,
            samples: 200,
            master_seed: 3,
            celf: false,
            output: None,
            parallelism: 1,
        };
        let rows = run_comparison(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        // Coupled realization of identical vectors: exactly zero, not noise.
        assert_eq!(rows[0].idm_value, 0.0);
        assert_eq!(rows[0].idm_stderr, 0.0);
    }

    #[test]
    fn zero_p_rows_activate_exactly_the_seeds() {
        let cfg = ExperimentConfig {
            network: "grid:rows=3,cols=3".into(),
            model: Model::Ic,
            base_p: vec![0.0],
            delta: vec![0.5],
            k: 2,
            samples: 100,
            master_seed: 3,
            celf: false,
            output: None,
            parallelism: 1,
        };
        let rows = run_comparison(&cfg).unwrap();
        assert_eq!(rows[0].im_value, 2.0);
        assert_eq!(rows[0].im_stderr, 0.0);
    }

    #[test]
    fn csv_schema_is_fixed() {
        let rows = vec![ReportRow {
            network: "clique:n=4".into(),
            p: 0.1,
            delta: 0.5,
            k: 1,
            samples: 10,
            im_value: 2.0,
            im_stderr: 0.1,
            idm_value: 1.0,
            idm_stderr: 0.2,
            ratio: Some(0.5),
            seconds: 0.01,
        }];
        let csv = report_rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "network,p,delta,k,M,im_value,im_stderr,idm_value,idm_stderr,ratio,seconds"
        );
        assert!(lines.next().unwrap().starts_with("clique:n=4,0.1,0.5,1,10,2.000000,"));
    }

    #[test]
    fn degenerate_ratio_is_flagged_not_numeric() {
        let im = Estimate {
            mean: 0.0,
            stderr: 0.0,
            samples: 10,
        };
        let idm = Estimate {
            mean: 1.0,
            stderr: 0.1,
            samples: 10,
        };
        assert_eq!(ratio_of(&im, &idm), None);
        let row = ReportRow {
            network: "x".into(),
            p: 0.0,
            delta: 0.0,
            k: 1,
            samples: 10,
            im_value: 0.0,
            im_stderr: 0.0,
            idm_value: 1.0,
            idm_stderr: 0.1,
            ratio: None,
            seconds: 0.0,
        };
        assert!(report_rows_to_csv(&[row]).contains(",NA,"));
    }

    #[test]
    fn regular_sweep_probability_formula() {
        let rows = run_regular_sweep(&[10], &[0.0, 0.2], 20, &[0.1], 1, 50, 5, false, 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].p - 0.1).abs() < 1e-12);
        assert!((rows[1].p - 0.12).abs() < 1e-12);
        let rows = run_regular_sweep(&[5], &[0.2], 20, &[0.1], 1, 50, 5, false, 1).unwrap();
        assert!((rows[0].p - 0.24).abs() < 1e-12);
    }
}
