//! Command-line front end: graph generation, spread estimation, seed
//! selection, difference maximization, and the experiment sweeps, with CSV
//! and JSON output. Exit codes: 0 success, 1 input error, 2 capacity error.

use std::io::{BufReader, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imstab::diffusion::{estimate_spread, exact_difference, exact_spread, EstimatorConfig};
use imstab::error::Error;
use imstab::graph::{load_edge_list, uniform_params, Model, ParamVector, SeedSet};
use imstab::optimize::{ExactDifference, ExactSpread, SaaDifference, SaaSpread};
use imstab::uncertainty::{extreme_params, relative_intervals, Direction, UncertaintyModel};
use imstab::Graph;

use imstab_cli::experiments::{
    clique_rows_to_csv, report_rows_to_csv, run_clique_table, run_comparison, run_regular_sweep,
    run_selection, ExperimentConfig, NetworkSpec,
};
use imstab_cli::instance::{dump_instance, load_instance, Instance};

#[derive(Parser)]
#[command(
    name = "imstab",
    about = "Influence maximization stability: diffusion estimation, seed selection, and \
             adversarial misestimation experiments",
    version
)]
struct Cli {
    /// Sampling threads (0 = all cores, 1 = serial). Results do not depend
    /// on this setting.
    #[arg(long, global = true, default_value_t = 0)]
    parallelism: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network and print its edge list.
    Generate {
        /// Network spec, e.g. smallworld:n=400,side=5,beta=0.1
        #[arg(long)]
        network: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the expected spread of a seed set (JSON).
    Estimate {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value = "ic")]
        model: Model,
        /// Base probability; each edge gets min(1, multiplicity * p).
        #[arg(long)]
        p: f64,
        /// Comma-separated seed node ids.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Select k seeds maximizing the expected spread (JSON report).
    Maximize {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value = "ic")]
        model: Model,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Use the exact oracle instead of Monte Carlo (small instances).
        #[arg(long)]
        exact: bool,
        /// Lazy (CELF) evaluation.
        #[arg(long)]
        celf: bool,
    },
    /// Select k seeds maximizing the adversarial spread difference (JSON).
    #[command(name = "diff-maximize")]
    DiffMaximize {
        /// Instance or edge-list file; stdin when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        model: Option<Model>,
        /// Base probability (plain edge lists only).
        #[arg(long)]
        p: Option<f64>,
        /// Relative perturbation (plain edge lists only).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        celf: bool,
    },
    /// Run the maximization-vs-difference comparison sweep (CSV).
    Stability {
        /// JSON config file; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        network: Option<String>,
        #[arg(long)]
        model: Option<Model>,
        /// Comma-separated base probabilities.
        #[arg(long)]
        p: Option<String>,
        /// Comma-separated perturbation levels.
        #[arg(long)]
        deltas: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        celf: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-seed clique instability table (CSV).
    Table1 {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value = "0.1,0.2,0.5")]
        deltas: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree sweep on random regular graphs (CSV).
    #[command(name = "sweep-regular")]
    SweepRegular {
        #[arg(long, default_value = "5,10,15,20,25")]
        degrees: String,
        #[arg(long, default_value = "-0.2,0,0.2", allow_hyphen_values = true)]
        alphas: String,
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, default_value = "0.01,0.05,0.1,0.2,0.5")]
        deltas: String,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        celf: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a named instance in the interval edge-list format.
    Fixture {
        #[command(subcommand)]
        which: FixtureCommand,
    },
    /// Exact computations on small instances.
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Edge-list file; stdin when omitted.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Interpret edges as undirected (add both directions).
    #[arg(long)]
    undirected: bool,
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// The 4-node instance whose spread difference is not submodular.
    Counterexample,
    /// The bipartite reduction instance built from a source graph.
    Reduction {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        undirected: bool,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact expected spread of a seed set.
    Sigma {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value = "ic")]
        model: Model,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seeds: String,
    },
    /// Exact spread difference of a seed set.
    Delta {
        /// Instance or edge-list file; stdin when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        model: Option<Model>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seeds: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if cli.parallelism > 0 {
        // A pool may already exist when invoked twice in-process; ignore.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.parallelism)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// Seed resolution: flag, then the IMSTAB_SEED environment variable, then 1.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("IMSTAB_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1)
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a number")))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a count")))
        })
        .collect()
}

fn parse_seed_set(s: &str) -> Result<SeedSet, Error> {
    let ids: Vec<u32> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a node id")))
        })
        .collect::<Result<_, _>>()?;
    Ok(SeedSet::from_ids(ids))
}

fn load_graph_arg(input: &GraphInput) -> Result<Graph, Error> {
    let (g, _) = match &input.graph {
        Some(path) => load_edge_list(BufReader::new(std::fs::File::open(path)?), input.undirected)?,
        None => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            load_edge_list(std::io::Cursor::new(text), input.undirected)?
        }
    };
    Ok(g)
}

fn load_instance_arg(path: &Option<PathBuf>) -> Result<Instance, Error> {
    match path {
        Some(path) => load_instance(BufReader::new(std::fs::File::open(path)?)),
        None => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            load_instance(std::io::Cursor::new(text))
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(content.as_bytes())?;
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

/// Extremal parameter pair of an instance: explicit intervals when present,
/// otherwise uniform parameters perturbed by a relative delta.
fn instance_extremes(
    inst: &Instance,
    model_flag: Option<Model>,
    p: Option<f64>,
    delta: Option<f64>,
) -> Result<(ParamVector, ParamVector), Error> {
    let to_pair = |g: &Graph, u: &UncertaintyModel| {
        (
            extreme_params(g, u, Direction::Upper),
            extreme_params(g, u, Direction::Lower),
        )
    };
    match &inst.intervals {
        Some(u) => {
            if p.is_some() || delta.is_some() {
                return Err(Error::InvalidInput(
                    "the instance already carries intervals; --p/--delta do not apply".into(),
                ));
            }
            Ok(to_pair(&inst.graph, u))
        }
        None => {
            let (p, delta) = match (p, delta) {
                (Some(p), Some(d)) => (p, d),
                _ => {
                    return Err(Error::InvalidInput(
                        "plain edge lists need --p and --delta to build intervals".into(),
                    ))
                }
            };
            let model = model_flag.unwrap_or(inst.model);
            let (theta, _) = uniform_params(&inst.graph, p, model)?;
            let (u, stats) = relative_intervals(&inst.graph, &theta, delta)?;
            if stats.rescaled_nodes > 0 {
                eprintln!(
                    "note: scaled upper bounds down on {} nodes to keep intervals feasible",
                    stats.rescaled_nodes
                );
            }
            Ok(to_pair(&inst.graph, &u))
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let parallelism = cli.parallelism;
    match cli.command {
        Command::Generate { network, seed, out } => {
            let spec: NetworkSpec = network.parse()?;
            let (g, _) = spec.resolve(resolve_seed(seed))?;
            emit(&out, &g.dump_to_string())
        }
        Command::Estimate {
            input,
            model,
            p,
            seeds,
            samples,
            seed,
        } => {
            let g = load_graph_arg(&input)?;
            let (theta, _) = uniform_params(&g, p, model)?;
            let seeds = parse_seed_set(&seeds)?;
            let cfg = EstimatorConfig {
                samples,
                master_seed: resolve_seed(seed),
                parallelism,
            };
            let est = estimate_spread(&g, &theta, &seeds, &cfg)?;
            println!("{}", serde_json::to_string(&est).expect("estimate serializes"));
            Ok(())
        }
        Command::Maximize {
            input,
            model,
            p,
            k,
            samples,
            seed,
            exact,
            celf,
        } => {
            let g = load_graph_arg(&input)?;
            let (theta, _) = uniform_params(&g, p, model)?;
            let report = if exact {
                let obj = ExactSpread::new(&g, &theta)?;
                run_selection(&obj, k, resolve_seed(seed), celf, false)?
            } else {
                let cfg = EstimatorConfig {
                    samples,
                    master_seed: resolve_seed(seed),
                    parallelism,
                };
                let obj = SaaSpread::new(&g, &theta, &cfg)?;
                run_selection(&obj, k, resolve_seed(seed), celf, false)?
            };
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::DiffMaximize {
            graph,
            model,
            p,
            delta,
            k,
            samples,
            seed,
            exact,
            celf,
        } => {
            let inst = load_instance_arg(&graph)?;
            let (plus, minus) = instance_extremes(&inst, model, p, delta)?;
            let master = resolve_seed(seed);
            let report = if exact {
                let obj = ExactDifference::new(&inst.graph, &plus, &minus)?;
                run_selection(&obj, k, master, celf, true)?
            } else {
                let cfg = EstimatorConfig {
                    samples,
                    master_seed: master,
                    parallelism,
                };
                let obj = SaaDifference::new(&inst.graph, &plus, &minus, &cfg)?;
                run_selection(&obj, k, master, celf, true)?
            };
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::Stability {
            config,
            network,
            model,
            p,
            deltas,
            k,
            samples,
            seed,
            celf,
            out,
        } => {
            let mut cfg: ExperimentConfig = match &config {
                Some(path) => serde_json::from_reader(BufReader::new(std::fs::File::open(path)?))
                    .map_err(|e| Error::InvalidInput(format!("config file: {e}")))?,
                None => ExperimentConfig {
                    network: String::new(),
                    model: Model::Ic,
                    base_p: vec![],
                    delta: vec![],
                    k: 0,
                    samples: 2000,
                    master_seed: resolve_seed(None),
                    celf: false,
                    output: None,
                    parallelism: 0,
                },
            };
            if let Some(n) = network {
                cfg.network = n;
            }
            if let Some(m) = model {
                cfg.model = m;
            }
            if let Some(p) = p {
                cfg.base_p = parse_f64_list(&p)?;
            }
            if let Some(d) = deltas {
                cfg.delta = parse_f64_list(&d)?;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(m) = samples {
                cfg.samples = m;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if celf {
                cfg.celf = true;
            }
            if let Some(o) = out {
                cfg.output = Some(o);
            }
            cfg.parallelism = parallelism;
            if cfg.network.is_empty() {
                return Err(Error::InvalidInput(
                    "stability needs --network or a --config file with one".into(),
                ));
            }
            let rows = run_comparison(&cfg)?;
            emit(&cfg.output.clone(), &report_rows_to_csv(&rows))
        }
        Command::Table1 {
            n,
            deltas,
            samples,
            seed,
            out,
        } => {
            let deltas = parse_f64_list(&deltas)?;
            let rows = run_clique_table(n, &deltas, samples, resolve_seed(seed), parallelism)?;
            emit(&out, &clique_rows_to_csv(&rows))
        }
        Command::SweepRegular {
            degrees,
            alphas,
            n,
            deltas,
            k,
            samples,
            seed,
            celf,
            out,
        } => {
            let rows = run_regular_sweep(
                &parse_usize_list(&degrees)?,
                &parse_f64_list(&alphas)?,
                n,
                &parse_f64_list(&deltas)?,
                k,
                samples,
                resolve_seed(seed),
                celf,
                parallelism,
            )?;
            emit(&out, &report_rows_to_csv(&rows))
        }
        Command::Fixture { which } => match which {
            FixtureCommand::Counterexample => {
                let (g, u) = imstab::verify::counterexample_instance();
                let labels = ["u", "v", "x", "y"].map(String::from);
                print!("{}", dump_instance(&g, Model::Ic, &u, Some(&labels)));
                Ok(())
            }
            FixtureCommand::Reduction { from, undirected } => {
                let (source, _) =
                    load_edge_list(BufReader::new(std::fs::File::open(&from)?), undirected)?;
                let r = imstab::verify::reduction_instance(&source)?;
                print!("{}", dump_instance(&r.graph, Model::Ic, &r.uncertainty, None));
                Ok(())
            }
        },
        Command::Oracle { what } => match what {
            OracleCommand::Sigma {
                input,
                model,
                p,
                seeds,
            } => {
                let g = load_graph_arg(&input)?;
                let (theta, _) = uniform_params(&g, p, model)?;
                let value = exact_spread(&g, &theta, &parse_seed_set(&seeds)?)?;
                println!("{value}");
                Ok(())
            }
            OracleCommand::Delta {
                graph,
                model,
                p,
                delta,
                seeds,
            } => {
                let inst = load_instance_arg(&graph)?;
                let (plus, minus) = instance_extremes(&inst, model, p, delta)?;
                let value = exact_difference(&inst.graph, &plus, &minus, &parse_seed_set(&seeds)?)?;
                println!("{value}");
                Ok(())
            }
        },
    }
}
