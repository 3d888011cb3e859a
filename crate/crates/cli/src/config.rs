//! Job configuration: a JSON file, overridden by command-line flags.
//!
//! ```json
//! {
//!   "system": { "benchmark": "car_parking" },
//!   "grid": [40, 40],
//!   "spec": { "reach": [[[4, 10], [-4, 0]]], "avoid": [[[4, 10], [0, 4]]], "horizon": 10 },
//!   "engine": { "order": "forward", "baseline": "none", "mem_budget": "2GiB" },
//!   "output": "out",
//!   "seed": 7,
//!   "simulate": { "initial_states": [[-5, -5]], "random_initial": 20, "trials": 10000 },
//!   "convergence": { "regions_per_axis": [20, 40, 80], "horizons": [10] }
//! }
//! ```
//!
//! `system` is either `{"benchmark": name}` or `{"inline": {...}}` with a
//! kernel and a region. A benchmark name wins when both are present. Every
//! field except `system` is optional and defaults to the benchmark's own
//! settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use odimdp::abstraction::GaussianKernelSpec;
use odimdp::bellman::EliminationOrder;
use odimdp::synthesis::{ReachAvoidSpec, Rect, SinkTreatment, DEFAULT_IMDP_BUDGET};
use odimdp::systems::{benchmark, BenchmarkDef};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSystem {
    pub name: Option<String>,
    pub kernel: GaussianKernelSpec,
    pub region: Rect,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub benchmark: Option<String>,
    pub inline: Option<InlineSystem>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    #[default]
    None,
    Imdp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrderArg {
    #[default]
    Forward,
    Reverse,
    Best,
}

impl From<OrderArg> for EliminationOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Forward => EliminationOrder::Forward,
            OrderArg::Reverse => EliminationOrder::Reverse,
            OrderArg::Best => EliminationOrder::Best,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default)]
    pub order: OrderArg,
    #[serde(default)]
    pub baseline: Baseline,
    #[serde(default)]
    pub baseline_sinks: SinkTreatment,
    /// Byte budget for dense IMDP tables, e.g. `"2GiB"` or a plain count.
    pub mem_budget: Option<String>,
    /// Solve safety directly instead of through the reachability dual.
    #[serde(default)]
    pub direct_safety: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default)]
    pub initial_states: Vec<Vec<f64>>,
    /// Additional initial states drawn uniformly over transient cells.
    #[serde(default)]
    pub random_initial: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
}

fn default_trials() -> u64 {
    10_000
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            initial_states: Vec::new(),
            random_initial: 20,
            trials: default_trials(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    #[serde(default)]
    pub regions_per_axis: Vec<usize>,
    #[serde(default)]
    pub horizons: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub system: SystemConfig,
    pub grid: Option<Vec<usize>>,
    pub spec: Option<ReachAvoidSpec>,
    pub horizon: Option<usize>,
    #[serde(default)]
    pub engine: EngineConfig,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolves the system, grid and spec into a benchmark definition.
    pub fn resolve(&self) -> Result<BenchmarkDef, CliError> {
        let mut def = match (&self.system.benchmark, &self.system.inline) {
            (Some(name), _) => benchmark(name)?,
            (None, Some(inline)) => {
                inline.kernel.check()?;
                let dim = inline.kernel.dim();
                if inline.region.len() != dim {
                    return Err(CliError::Config(format!(
                        "region has {} axes, kernel has {dim}",
                        inline.region.len()
                    )));
                }
                BenchmarkDef {
                    name: inline.name.clone().unwrap_or_else(|| "inline".into()),
                    kernel: inline.kernel.clone(),
                    region: inline.region.clone(),
                    counts: vec![1; dim],
                    spec: ReachAvoidSpec::reach_avoid(Vec::new(), Vec::new(), odimdp::systems::DEFAULT_HORIZON)?,
                }
            }
            (None, None) => {
                return Err(CliError::Config(
                    "no system given: use --benchmark or a config with a system".into(),
                ))
            }
        };
        if let Some(spec) = &self.spec {
            spec.check()?;
            def.spec = spec.clone();
        }
        if let Some(h) = self.horizon {
            def.spec.horizon = h;
        }
        if let Some(grid) = &self.grid {
            def.counts = expand_grid(grid, def.region.len())?;
        }
        Ok(def)
    }

    pub fn mem_budget(&self) -> Result<u128, CliError> {
        self.engine
            .mem_budget
            .as_deref()
            .map(parse_bytes)
            .transpose()
            .map(|b| b.unwrap_or(DEFAULT_IMDP_BUDGET))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// One count for every axis, or one per axis.
pub fn expand_grid(grid: &[usize], dim: usize) -> Result<Vec<usize>, CliError> {
    match grid.len() {
        1 => Ok(vec![grid[0]; dim]),
        n if n == dim => Ok(grid.to_vec()),
        n => Err(CliError::Config(format!("grid has {n} counts, system has {dim} axes"))),
    }
}

/// Parses `40x40`, `40,40` or `8`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(['x', 'X', ','])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| CliError::Config(format!("bad grid count {p:?} in {s:?}")))
        })
        .collect()
}

/// Parses byte sizes such as `1500`, `512MB`, `2GiB`, `1.5 TB`.
pub fn parse_bytes(s: &str) -> Result<u128, CliError> {
    let t = s.trim();
    let split = t
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .parse()
        .map_err(|_| CliError::Config(format!("bad byte size {s:?}")))?;
    let scale: f64 = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1.0,
        "kb" | "k" => 1e3,
        "mb" | "m" => 1e6,
        "gb" | "g" => 1e9,
        "tb" | "t" => 1e12,
        "kib" => 1024.0,
        "mib" => 1024f64.powi(2),
        "gib" => 1024f64.powi(3),
        "tib" => 1024f64.powi(4),
        other => return Err(CliError::Config(format!("unknown byte unit {other:?}"))),
    };
    Ok((value * scale) as u128)
}
