use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use tsrealize::instances::{self, Seed};
use tsrealize::io::{self, Instance};
use tsrealize::{mip, oracle, Error, FiniteMetric, RealizationGraph};

mod bench;

#[derive(Parser)]
#[command(name = "tsrealize", version, about = "Realize finite metrics as weighted graphs inside their tight span")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// l1 distances between random grid points (points file)
    L1,
    /// sum of two random binary tree metrics (metric file)
    Doubletree,
    /// random two-compatible split system of size 2n (split file)
    Splits2,
    /// uniformly random distances (metric file)
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance
    Gen {
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the realization heuristic on a metric, points or split file
    Realize {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Check that a graph (JSON) realizes a metric exactly
    Verify { metric: PathBuf, graph: PathBuf },
    /// Write the minimal-subrealization MIP of a graph in LP format
    ExportMip {
        metric: PathBuf,
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// only create flow variables on shortest paths
        #[arg(long)]
        reduce: bool,
    },
    /// Exhaustive reference computations for small instances
    Oracle {
        #[command(subcommand)]
        task: OracleTask,
    },
    /// Run the heuristic on many random instances and report CSV
    Bench {
        family: Family,
        /// comma-separated ground set sizes
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        with_oracle: bool,
        /// include mean wall-clock runtime (makes output nondeterministic)
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_N)]
        max_oracle_n: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_EDGES)]
        max_oracle_edges: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleTask {
    /// Enumerate the vertices of the tight span
    Vertices {
        input: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_N)]
        max_oracle_n: usize,
    },
    /// Minimal subrealization of a graph (JSON)
    Subreal {
        metric: PathBuf,
        graph: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_EDGES)]
        max_oracle_edges: usize,
        /// write the optimal subgraph here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Minimum Manhattan network length of a points file
    Mmn {
        points: PathBuf,
        #[arg(long, default_value_t = 40)]
        max_oracle_edges: usize,
    },
}

/// Bad flags or parameters; exits with status 2 like clap's own errors.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_metric(path: &Path) -> anyhow::Result<FiniteMetric> {
    let text = read(path)?;
    let instance = io::read_instance(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(instance.metric()?)
}

fn load_graph(path: &Path, metric: &FiniteMetric) -> anyhow::Result<RealizationGraph> {
    let graph = io::graph_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(io::align_labels(&graph, metric.labels())?)
}

fn render(graph: &RealizationGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => io::graph_to_json(graph),
        GraphFormat::Dot => io::graph_to_dot(graph),
    }
}

fn gen_text(family: Family, n: usize, seed: Seed) -> tsrealize::Result<(String, String)> {
    Ok(match family {
        Family::L1 => {
            let p = instances::gen_l1_points(n, seed)?;
            (io::write_points(&p), format!("{} points", p.len()))
        }
        Family::Doubletree => {
            let d = instances::gen_double_tree_metric(n, seed)?;
            (io::write_metric(&d), format!("metric on {} labels", d.len()))
        }
        Family::Splits2 => {
            let s = instances::gen_two_compatible_system(n, seed)?;
            (io::write_split_system(&s), format!("{} splits on {} labels", s.len(), s.labels().len()))
        }
        Family::Random => {
            let d = instances::gen_random_metric(n, seed)?;
            (io::write_metric(&d), format!("metric on {} labels", d.len()))
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen { family, n, seed, out } => {
            let (text, summary) = gen_text(family, n, Seed(seed)).map_err(|e| match e {
                Error::TooFewLabels { .. } | Error::TooManyLabels(_) => anyhow::Error::new(Usage(e.to_string())),
                e => e.into(),
            })?;
            emit(out.as_deref(), &text)?;
            eprintln!("generated {summary} (seed {seed})");
        }
        Command::Realize { input, out, format } => {
            let metric = load_metric(&input)?;
            let graph = tsrealize::realize(&metric)?;
            emit(out.as_deref(), &render(&graph, format))?;
            eprintln!(
                "n={} vertices={} edges={} total_length={}",
                metric.len(),
                graph.vertex_count(),
                graph.edge_count(),
                graph.total_length()
            );
        }
        Command::Verify { metric, graph } => {
            let metric = load_metric(&metric)?;
            let graph = load_graph(&graph, &metric)?;
            return Ok(match tsrealize::verify_realization(&graph, &metric) {
                Ok(report) => match report.mismatch {
                    None => {
                        println!("PASS total_length={}", report.total_length);
                        ExitCode::SUCCESS
                    }
                    Some(m) => {
                        println!("FAIL d({}, {}) = {} in the graph, expected {}", m.x, m.y, m.graph_distance, m.expected);
                        ExitCode::from(1)
                    }
                },
                Err(e @ (Error::DisconnectedGraph | Error::UnlabeledElement(_))) => {
                    println!("FAIL {e}");
                    ExitCode::from(1)
                }
                Err(e) => return Err(e.into()),
            });
        }
        Command::ExportMip { metric, graph, out, reduce } => {
            let metric = load_metric(&metric)?;
            let graph = load_graph(&graph, &metric)?;
            let model = mip::build_subrealization_mip(&graph, &metric, reduce)?.model;
            emit(out.as_deref(), &mip::write_lp(&model))?;
            eprintln!(
                "variables={} binary={} continuous={} constraints={}",
                model.variables.len(),
                model.num_binary(),
                model.num_continuous(),
                model.constraints.len()
            );
        }
        Command::Oracle { task } => oracle_task(task)?,
        Command::Bench { family, n, count, seed, with_oracle, timing, max_oracle_n, max_oracle_edges, out } => {
            if count == 0 {
                bail!(Usage("--count must be positive".into()));
            }
            let config = bench::Config { family, sizes: n, count, seed, with_oracle, timing, max_oracle_n, max_oracle_edges };
            let csv = bench::run(&config, bench::threads()?)?;
            emit(out.as_deref(), &csv)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_task(task: OracleTask) -> anyhow::Result<()> {
    match task {
        OracleTask::Vertices { input, max_oracle_n } => {
            let metric = load_metric(&input)?;
            let vertices = oracle::enumerate_vertices(&metric, max_oracle_n)?;
            println!("vertices={}", vertices.len());
            for v in &vertices {
                println!("{v}");
            }
        }
        OracleTask::Subreal { metric, graph, max_oracle_edges, out, format } => {
            let metric = load_metric(&metric)?;
            let graph = load_graph(&graph, &metric)?;
            let best = oracle::min_subrealization(&graph, &metric, max_oracle_edges)?;
            println!("optimal_length={} edges={}", best.total_length, best.edges().len());
            if let Some(out) = out {
                emit(Some(&out), &render(&graph.edge_subgraph(&best.keep), format))?;
            }
        }
        OracleTask::Mmn { points, max_oracle_edges } => {
            let points = match io::read_instance(&read(&points)?)? {
                Instance::Points(p) => p,
                _ => bail!(Usage(format!("{} is not a points file", points.display()))),
            };
            println!("mmn_length={}", oracle::min_manhattan_length(&points, max_oracle_edges)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
