use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netdenoise::error_rates::{NullFamily, RateConfig, ThresholdRule};
use netdenoise::graph::read_edge_list;
use netdenoise::{Adjacency, NoiseSpec};
use netdenoise_cli::commands::{self, DenoiseRequest};
use netdenoise_cli::{CliResult, ExperimentConfig, Failure, GraphSpec, Grid};

#[derive(Parser)]
#[command(name = "netdenoise", version, about = "Spectral denoising experiments on noisy networks")]
struct Cli {
    /// RNG seed; overrides the config's noise seed (and a generator's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the Monte Carlo trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list with a JSON sidecar.
    Generate {
        #[command(subcommand)]
        graph: GenerateGraph,
        /// Base file name; defaults to the generator name.
        #[arg(long, global = true)]
        name: Option<String>,
    },
    /// Risk-bound curves for every truncation rank.
    Bounds {
        #[command(flatten)]
        run: RunArgs,
        /// Fail (exit 4) when the concentration hypotheses do not hold.
        #[arg(long)]
        require_empirical: bool,
    },
    /// Monte Carlo errors of each estimator and statistic.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Density error of empirical(1) under misspecified rates.
    Robustness {
        #[command(flatten)]
        run: RunArgs,
        /// Assumed p values (comma separated).
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        /// Assumed q values (comma separated).
        #[arg(long, value_delimiter = ',')]
        q_grid: Option<Vec<f64>>,
    },
    /// Statistics of a graph and, optionally, of its rank-s estimate.
    Stats {
        /// Edge list to evaluate; defaults to the config graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Statistic name (repeatable).
        #[arg(long = "statistic", short = 's')]
        statistics: Vec<String>,
        #[arg(long, requires_all = ["q", "rank"])]
        p: Option<f64>,
        #[arg(long, requires_all = ["p", "rank"])]
        q: Option<f64>,
        /// Truncation rank of the denoised estimate.
        #[arg(long, requires_all = ["p", "q"])]
        rank: Option<usize>,
    },
    /// Estimate (p, q) from a matrix of edge scores.
    EstimateRates {
        /// Square CSV of pairwise scores.
        #[arg(long)]
        scores: PathBuf,
        /// Local false discovery rate level for the threshold.
        #[arg(long, conflicts_with_all = ["null_sd", "threshold"])]
        lfdr: Option<f64>,
        /// Threshold at this many null standard deviations.
        #[arg(long, conflicts_with = "threshold")]
        null_sd: Option<f64>,
        /// Fixed threshold.
        #[arg(long)]
        threshold: Option<f64>,
        /// Declare edges on |score| above the threshold.
        #[arg(long)]
        two_sided: bool,
        /// Also write the thresholded graph here.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Clone)]
enum GenerateGraph {
    Torus {
        #[arg(long, default_value_t = 5)]
        cycle: usize,
        #[arg(long, default_value_t = 5)]
        dim: usize,
    },
    Lattice {
        /// Path lengths (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "cartesian")]
        basis: String,
    },
    Cycle {
        #[arg(long)]
        k: usize,
    },
    Path {
        #[arg(long)]
        k: usize,
    },
    Star {
        #[arg(long)]
        leaves: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
    Powerlaw {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.5)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        d_min: f64,
    },
}

impl GenerateGraph {
    fn into_spec(self, seed: Option<u64>) -> GraphSpec {
        match self {
            Self::Torus { cycle, dim } => GraphSpec::Torus { cycle, dim },
            Self::Lattice { sizes, basis } => GraphSpec::Lattice { sizes, basis },
            Self::Cycle { k } => GraphSpec::Cycle { k },
            Self::Path { k } => GraphSpec::Path { k },
            Self::Star { leaves } => GraphSpec::Star { leaves },
            Self::Complete { n } => GraphSpec::Complete { n },
            Self::Powerlaw { n, gamma, d_min } => GraphSpec::Powerlaw { n, gamma, d_min, seed: seed.unwrap_or(0) },
        }
    }
}

/// Flags shared by the experiment commands; each overrides its config key.
#[derive(Args)]
struct RunArgs {
    /// Edge list used as the true graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Estimator spec (repeatable): naive, ideal(<s>|auto), empirical(<s>|auto).
    #[arg(long = "estimator")]
    estimators: Vec<String>,
    /// Statistic name (repeatable).
    #[arg(long = "statistic")]
    statistics: Vec<String>,
    /// Keep the (n-1)² factor in the maximum-degree remainder term.
    #[arg(long)]
    strict_corollary: bool,
}

fn base_config(cli: &Cli) -> CliResult<Option<ExperimentConfig>> {
    cli.config.as_deref().map(ExperimentConfig::load).transpose()
}

fn experiment(cli: &Cli, run: &RunArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match base_config(cli)? {
        Some(cfg) => cfg,
        None => {
            let graph = run.graph.clone().ok_or_else(|| Failure::Usage("need --config or --graph".into()))?;
            let (p, q) = match (run.p, run.q) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(Failure::Usage("need --config or both --p and --q".into())),
            };
            ExperimentConfig::new(GraphSpec::Edges { path: graph }, NoiseSpec::new(p, q, 0)?)
        }
    };
    if let Some(path) = &run.graph {
        cfg.graph = GraphSpec::Edges { path: path.clone() };
    }
    if let Some(p) = run.p {
        cfg.noise.p = p;
    }
    if let Some(q) = run.q {
        cfg.noise.q = q;
    }
    if let Some(seed) = cli.seed {
        cfg.noise.seed = seed;
        cfg.graph.reseed(seed);
    }
    if let Some(t) = run.trials {
        cfg.trials = t;
    }
    if !run.estimators.is_empty() {
        cfg.estimators = run.estimators.clone();
    }
    if !run.statistics.is_empty() {
        cfg.statistics = run.statistics.clone();
    }
    cfg.strict_corollary |= run.strict_corollary;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> CliResult<PathBuf> {
    if let Some(out) = &cli.out {
        return Ok(out.clone());
    }
    Ok(base_config(cli)?.map(|c| c.output_dir).unwrap_or_else(|| PathBuf::from("out")))
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Generate { graph, name } => {
            let spec = graph.clone().into_spec(cli.seed);
            let name = name.clone().unwrap_or_else(|| spec.name().to_string());
            commands::generate(&spec, &name, &out_dir(&cli)?)
        }
        Command::Bounds { run, require_empirical } => {
            let cfg = experiment(&cli, run)?;
            commands::bounds(&cfg, *require_empirical, &cfg.output_dir)
        }
        Command::Simulate { run } => {
            let cfg = experiment(&cli, run)?;
            commands::simulate(&cfg, &cfg.output_dir)
        }
        Command::Robustness { run, p_grid, q_grid } => {
            let mut cfg = experiment(&cli, run)?;
            if p_grid.is_some() || q_grid.is_some() {
                let base = cfg.grid.clone().unwrap_or(Grid { p: vec![cfg.noise.p], q: vec![cfg.noise.q] });
                cfg.grid = Some(Grid { p: p_grid.clone().unwrap_or(base.p), q: q_grid.clone().unwrap_or(base.q) });
            }
            commands::robustness(&cfg, &cfg.output_dir)
        }
        Command::Stats { graph, statistics, p, q, rank } => {
            let cfg = base_config(&cli)?;
            let adjacency: Adjacency = match (graph, &cfg) {
                (Some(path), _) => read_edge_list(path)?,
                (None, Some(cfg)) => {
                    let mut spec = cfg.graph.clone();
                    if let Some(seed) = cli.seed {
                        spec.reseed(seed);
                    }
                    spec.build()?.0
                }
                (None, None) => return Err(Failure::Usage("stats needs --graph or --config".into())),
            };
            let names = if statistics.is_empty() {
                cfg.as_ref().map(|c| c.statistics.clone()).unwrap_or_default()
            } else {
                statistics.clone()
            };
            if names.is_empty() {
                return Err(Failure::Usage("no statistics requested".into()));
            }
            let stats = commands::parse_statistics(&names)?;
            let req = match (p, q, rank) {
                (Some(p), Some(q), Some(s)) => {
                    NoiseSpec::new(*p, *q, 0)?;
                    Some(DenoiseRequest { p: *p, q: *q, s: *s })
                }
                _ => None,
            };
            commands::stats(&adjacency, &stats, req, &out_dir(&cli)?)
        }
        Command::EstimateRates { scores, lfdr, null_sd, threshold, two_sided, graph_out } => {
            let threshold_rule = match (lfdr, null_sd, threshold) {
                (_, _, Some(t)) => ThresholdRule::Fixed(*t),
                (_, Some(k), None) => ThresholdRule::NullSd(*k),
                (Some(l), None, None) => ThresholdRule::Lfdr(*l),
                (None, None, None) => RateConfig::default().threshold_rule,
            };
            let config = RateConfig { null_family: NullFamily::Gaussian, threshold_rule, two_sided: *two_sided };
            commands::estimate_rates(scores, &config, graph_out.as_deref(), &out_dir(&cli)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("netdenoise: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
