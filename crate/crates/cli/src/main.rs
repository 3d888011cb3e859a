use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use odimdp_cli::commands;
use odimdp_cli::config::{parse_grid, Baseline, JobConfig, OrderArg};
use odimdp_cli::CliError;

/// Abstraction and reach-avoid synthesis with orthogonally decoupled IMDPs.
#[derive(Parser)]
#[command(name = "odimdp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the abstraction and write the model file.
    Abstract(Common),
    /// Synthesize a policy and write values, policy and metrics.
    Synthesize {
        #[command(flatten)]
        common: Common,
        /// Use a model file instead of building the abstraction.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Compare against the product-IMDP baseline.
    Compare(Common),
    /// Check the synthesized bounds by Monte Carlo simulation.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Trajectories per initial state.
        #[arg(long)]
        trials: Option<u64>,
        /// Random initial states drawn from transient cells.
        #[arg(long)]
        random_initial: Option<usize>,
    },
    /// Mean error over a sweep of grid resolutions.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Regions per axis, e.g. `20,40,80`.
        #[arg(long, value_delimiter = ',')]
        regions: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Built-in benchmark; overrides the config's system.
    #[arg(long)]
    benchmark: Option<String>,
    /// JSON job configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cells per axis: `40x40`, or one count for every axis.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    #[arg(long, value_enum)]
    order: Option<OrderArg>,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "ODIMDP_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Budget for dense IMDP tables, e.g. `2GiB`.
    #[arg(long)]
    mem_budget: Option<String>,
}

impl Common {
    fn config(&self) -> Result<JobConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => JobConfig::load(p)?,
            None => JobConfig::default(),
        };
        if let Some(b) = &self.benchmark {
            cfg.system.benchmark = Some(b.clone());
        }
        if let Some(g) = &self.grid {
            cfg.grid = Some(parse_grid(g)?);
        }
        if self.horizon.is_some() {
            cfg.horizon = self.horizon;
        }
        if let Some(b) = self.baseline {
            cfg.engine.baseline = b;
        }
        if let Some(o) = self.order {
            cfg.engine.order = o;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        if self.mem_budget.is_some() {
            cfg.engine.mem_budget = self.mem_budget.clone();
        }
        if let Some(n) = self.workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    match cli.command {
        Command::Abstract(c) => commands::cmd_abstract(&c.config()?),
        Command::Synthesize { common, model } => commands::cmd_synthesize(&common.config()?, model.as_deref()),
        Command::Compare(c) => commands::cmd_compare(&c.config()?),
        Command::Simulate {
            common,
            trials,
            random_initial,
        } => {
            let mut cfg = common.config()?;
            if let Some(t) = trials {
                cfg.simulate.trials = t;
            }
            if let Some(n) = random_initial {
                cfg.simulate.random_initial = n;
            }
            commands::cmd_simulate(&cfg)
        }
        Command::Convergence { common, regions } => {
            let mut cfg = common.config()?;
            if !regions.is_empty() {
                cfg.convergence.regions_per_axis = regions;
            }
            commands::cmd_convergence(&cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
