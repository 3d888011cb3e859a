//! Reach-avoid synthesis on abstractions, metrics, concrete policies and
//! Monte Carlo validation.

pub mod montecarlo;
pub mod pipeline;
pub mod spec;

use serde::{Deserialize, Serialize};

use crate::abstraction::RectPartition;
use crate::bellman::{
    evaluate_policy, value_iteration, Adversary, IterationOptions, Labeling, Objective, Policy,
    PropertyKind, SpecDirection, StateLabel,
};
use crate::error::{Error, Result};
use crate::models::ModelRef;

pub use montecarlo::{clopper_pearson, monte_carlo_validate, sample_initial_states, McEstimate};
pub use pipeline::{
    convergence, run_benchmark, Abstraction, BaselineRun, BenchmarkRun, ConvergenceRow, RunOptions,
    SinkTreatment, DEFAULT_IMDP_BUDGET,
};
pub use spec::{label_states, CellLabels, ReachAvoidSpec, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub iteration: IterationOptions,
    /// Solve safety as `1 −` the minimal optimistic probability of reaching
    /// the unsafe states, instead of iterating the safety value directly.
    pub safety_via_dual: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            iteration: IterationOptions::default(),
            safety_via_dual: true,
        }
    }
}

/// Min / max / mean of a per-state difference over transient states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// Mean of the lower bound over transient states.
    pub mean_v: f64,
    /// Mean gap between upper and lower bound over transient states.
    pub eps: f64,
    pub transient_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaStats>,
}

/// Bounds `[V^π, V̂^π]` of the pessimistically synthesized policy `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub v_lower: Vec<f64>,
    pub v_upper: Vec<f64>,
    pub policy: Policy,
    pub labels: Vec<StateLabel>,
    pub metrics: MetricsRecord,
    pub horizon: usize,
}

impl SynthesisResult {
    pub fn transient(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == StateLabel::Transient)
            .map(|(s, _)| s)
    }

    /// Per-transient-state gaps `V̂ − V`.
    pub fn gaps(&self) -> Vec<f64> {
        self.transient().map(|s| self.v_upper[s] - self.v_lower[s]).collect()
    }
}

fn mean_over(values: &[f64], labels: &[StateLabel]) -> f64 {
    let (sum, n) = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == StateLabel::Transient)
        .fold((0.0, 0usize), |(s, n), (&v, _)| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn metrics(v_lower: &[f64], v_upper: &[f64], labels: &[StateLabel]) -> MetricsRecord {
    let gap: Vec<f64> = v_upper.iter().zip(v_lower).map(|(u, l)| u - l).collect();
    MetricsRecord {
        mean_v: mean_over(v_lower, labels),
        eps: mean_over(&gap, labels),
        transient_states: labels.iter().filter(|&&l| l == StateLabel::Transient).count(),
        delta: None,
    }
}

/// Unsafe states (avoid and sinks) become the target of the dual problem.
fn dual_labeling(labeling: &Labeling) -> Result<Labeling> {
    let labels = labeling
        .labels()
        .iter()
        .map(|&l| match l {
            StateLabel::Avoid => StateLabel::Reach,
            other => other,
        })
        .collect();
    Labeling::new(labels, PropertyKind::ReachAvoid)
}

/// Pessimistic synthesis: `π` maximizes the lower bound against a
/// minimizing adversary, then is evaluated against a maximizing one.
pub fn synthesize(
    model: ModelRef<'_>,
    labeling: &Labeling,
    horizon: usize,
    options: &SynthesisOptions,
) -> Result<SynthesisResult> {
    let it = &options.iteration;
    let (v_lower, v_upper, policy) =
        if labeling.kind() == PropertyKind::Safety && options.safety_via_dual {
            let dual = dual_labeling(labeling)?;
            let dir = SpecDirection {
                adversary: Adversary::Optimistic,
                objective: Objective::Minimize,
            };
            let (w, policy) = value_iteration(model, &dual, horizon, dir, it)?;
            let w_lo = evaluate_policy(model, &dual, &policy, Adversary::Pessimistic, it)?;
            let lower = w.values.iter().map(|x| 1.0 - x).collect();
            let upper = w_lo.values.iter().map(|x| 1.0 - x).collect();
            (lower, upper, policy)
        } else {
            let (v, policy) = value_iteration(model, labeling, horizon, SpecDirection::PESSIMISTIC_MAX, it)?;
            let up = evaluate_policy(model, labeling, &policy, Adversary::Optimistic, it)?;
            (v.values, up.values, policy)
        };
    let labels = labeling.labels().to_vec();
    Ok(SynthesisResult {
        metrics: metrics(&v_lower, &v_upper, &labels),
        v_lower,
        v_upper,
        policy,
        labels,
        horizon,
    })
}

/// `δ(s) = V_a(s) − V_b(s)` over transient states of the lower bounds.
pub fn compare(a: &SynthesisResult, b: &SynthesisResult) -> Result<DeltaStats> {
    if a.labels != b.labels || a.v_lower.len() != b.v_lower.len() {
        return Err(Error::Shape("compared results differ in states or labels".into()));
    }
    let deltas: Vec<f64> = a.transient().map(|s| a.v_lower[s] - b.v_lower[s]).collect();
    if deltas.is_empty() {
        return Ok(DeltaStats::default());
    }
    Ok(DeltaStats {
        min: deltas.iter().copied().fold(f64::INFINITY, f64::min),
        max: deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: deltas.iter().sum::<f64>() / deltas.len() as f64,
    })
}

/// `π_x(x, t) = π(J(x), H − t)`: the abstract action of the cell holding `x`
/// at elapsed time `t`.
pub struct ConcretePolicy<'a> {
    pub result: &'a SynthesisResult,
    pub partition: &'a RectPartition,
}

impl<'a> ConcretePolicy<'a> {
    pub fn new(result: &'a SynthesisResult, partition: &'a RectPartition) -> Result<Self> {
        if partition.layout().num_states() != result.labels.len() {
            return Err(Error::Shape("partition does not match the result".into()));
        }
        Ok(Self { result, partition })
    }

    pub fn state_of(&self, x: &[f64]) -> Result<usize> {
        let coords = self
            .partition
            .locate(x)
            .ok_or_else(|| Error::InvalidInput(format!("{x:?} is outside the region of interest")))?;
        Ok(self.partition.layout().index_of(&coords))
    }

    pub fn action(&self, x: &[f64], t: usize) -> Result<usize> {
        let h = self.result.horizon;
        if t >= h {
            return Err(Error::InvalidInput(format!("time {t} is past the horizon {h}")));
        }
        Ok(self.result.policy.action(h - t, self.state_of(x)?))
    }
}
