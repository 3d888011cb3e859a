use serde::{Deserialize, Serialize};

use crate::bellman::engine::{Sweeper, DEFAULT_TABLE_BUDGET};
use crate::bellman::omax::Adversary;
use crate::bellman::recursive::EliminationOrder;
use crate::error::{Error, Result};
use crate::models::ModelRef;

/// Horizons beyond this are rejected.
pub const MAX_HORIZON: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Reach,
    Avoid,
    Transient,
}

/// What the value function measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    /// Reach a `Reach` state before any `Avoid` state: `V_0 = 1_R`.
    #[default]
    ReachAvoid,
    /// Never enter an `Avoid` state: `V_0 = 1` off the avoid set.
    Safety,
}

/// Terminal-state labeling of a model's joint states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    labels: Vec<StateLabel>,
    kind: PropertyKind,
}

impl Labeling {
    pub fn new(labels: Vec<StateLabel>, kind: PropertyKind) -> Result<Self> {
        if kind == PropertyKind::Safety && labels.contains(&StateLabel::Reach) {
            return Err(Error::Labeling("safety labelings have no reach states".into()));
        }
        Ok(Self { labels, kind })
    }

    /// Labels from membership masks; a state in both sets is an error.
    pub fn reach_avoid(reach: &[bool], avoid: &[bool]) -> Result<Self> {
        if reach.len() != avoid.len() {
            return Err(Error::Shape("reach and avoid masks differ in length".into()));
        }
        let mut labels = Vec::with_capacity(reach.len());
        for (s, (&r, &o)) in reach.iter().zip(avoid).enumerate() {
            labels.push(match (r, o) {
                (true, true) => {
                    return Err(Error::Labeling(format!("state {s} is both reach and avoid")))
                }
                (true, false) => StateLabel::Reach,
                (false, true) => StateLabel::Avoid,
                (false, false) => StateLabel::Transient,
            });
        }
        Ok(Self {
            labels,
            kind: PropertyKind::ReachAvoid,
        })
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn kind(&self) -> PropertyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_transient(&self, s: usize) -> bool {
        self.labels[s] == StateLabel::Transient
    }

    pub fn transient_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l == StateLabel::Transient).collect()
    }

    pub fn transient_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == StateLabel::Transient).count()
    }

    pub fn initial_values(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&l| match (self.kind, l) {
                (_, StateLabel::Reach) => 1.0,
                (_, StateLabel::Avoid) => 0.0,
                (PropertyKind::ReachAvoid, StateLabel::Transient) => 0.0,
                (PropertyKind::Safety, StateLabel::Transient) => 1.0,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Maximize,
    Minimize,
}

/// Controller objective and adversary resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDirection {
    pub adversary: Adversary,
    pub objective: Objective,
}

impl SpecDirection {
    /// Max-min: the controller maximizes against a minimizing adversary.
    pub const PESSIMISTIC_MAX: SpecDirection = SpecDirection {
        adversary: Adversary::Pessimistic,
        objective: Objective::Maximize,
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    pub step: usize,
}

/// Time-varying deterministic policy; `action(k, s)` is the action when
/// `k ≥ 1` steps remain. Terminal states carry action 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    steps: Vec<Vec<u32>>,
}

impl Policy {
    pub fn from_steps(steps: Vec<Vec<u32>>) -> Self {
        Self { steps }
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn action(&self, steps_to_go: usize, state: usize) -> usize {
        self.steps[steps_to_go - 1][state] as usize
    }

    pub fn step(&self, steps_to_go: usize) -> &[u32] {
        &self.steps[steps_to_go - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationOptions {
    pub order: EliminationOrder,
    /// Memory allowed for shared-subproblem tables in odIMDP sweeps.
    pub table_budget: u128,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            order: EliminationOrder::Forward,
            table_budget: DEFAULT_TABLE_BUDGET,
        }
    }
}

/// Full output of value iteration, with every intermediate value function.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    /// `history[k]` is `V_k`, for `k = 0..=H`.
    pub history: Vec<Vec<f64>>,
    pub policy: Policy,
}

fn check_inputs(model: ModelRef<'_>, labeling: &Labeling, horizon: usize) -> Result<()> {
    if labeling.len() != model.num_states() {
        return Err(Error::Shape(format!(
            "labeling covers {} states, model has {}",
            labeling.len(),
            model.num_states()
        )));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} exceeds the maximum of {MAX_HORIZON}"
        )));
    }
    Ok(())
}

/// Applies `g`: terminal states keep their fixed value, transient states
/// take the Bellman value.
#[inline]
fn clamp_terminal(label: StateLabel, v: f64) -> f64 {
    match label {
        StateLabel::Reach => 1.0,
        StateLabel::Avoid => 0.0,
        StateLabel::Transient => v,
    }
}

/// Finite-horizon robust value iteration with policy synthesis.
pub fn value_iteration(
    model: ModelRef<'_>,
    labeling: &Labeling,
    horizon: usize,
    direction: SpecDirection,
    options: &IterationOptions,
) -> Result<(ValueFunction, Policy)> {
    let trace = value_iteration_trace(model, labeling, horizon, direction, options)?;
    let values = trace.history.last().cloned().unwrap_or_default();
    Ok((
        ValueFunction {
            values,
            step: horizon,
        },
        trace.policy,
    ))
}

/// Like [`value_iteration`] but keeps `V_k` for every step.
pub fn value_iteration_trace(
    model: ModelRef<'_>,
    labeling: &Labeling,
    horizon: usize,
    direction: SpecDirection,
    options: &IterationOptions,
) -> Result<IterationTrace> {
    check_inputs(model, labeling, horizon)?;
    let num_actions = model.num_actions();
    let labels = labeling.labels();
    let sweeper = Sweeper::new(model, labeling.transient_mask(), options.order, options.table_budget)?;
    let mut history = vec![labeling.initial_values()];
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let prev = history.last().expect("history starts non-empty");
        let q = sweeper.sweep(prev, direction.adversary);
        let mut next = vec![0.0; labels.len()];
        let mut actions = vec![0u32; labels.len()];
        for (s, &label) in labels.iter().enumerate() {
            if label != StateLabel::Transient {
                next[s] = clamp_terminal(label, 0.0);
                continue;
            }
            let row = &q[s * num_actions..(s + 1) * num_actions];
            let mut best = 0usize;
            for a in 1..num_actions {
                let better = match direction.objective {
                    Objective::Maximize => row[a] > row[best],
                    Objective::Minimize => row[a] < row[best],
                };
                if better {
                    best = a;
                }
            }
            next[s] = clamp_terminal(label, row[best]);
            actions[s] = best as u32;
        }
        history.push(next);
        steps.push(actions);
    }
    Ok(IterationTrace {
        history,
        policy: Policy::from_steps(steps),
    })
}

/// Robust value of a fixed policy, `V^π` (pessimistic) or `V̂^π` (optimistic).
pub fn evaluate_policy(
    model: ModelRef<'_>,
    labeling: &Labeling,
    policy: &Policy,
    adversary: Adversary,
    options: &IterationOptions,
) -> Result<ValueFunction> {
    let history = evaluate_policy_trace(model, labeling, policy, adversary, options)?;
    Ok(ValueFunction {
        step: policy.horizon(),
        values: history.last().cloned().unwrap_or_default(),
    })
}

/// Every step of [`evaluate_policy`].
pub fn evaluate_policy_trace(
    model: ModelRef<'_>,
    labeling: &Labeling,
    policy: &Policy,
    adversary: Adversary,
    options: &IterationOptions,
) -> Result<Vec<Vec<f64>>> {
    let horizon = policy.horizon();
    check_inputs(model, labeling, horizon)?;
    let num_actions = model.num_actions();
    let labels = labeling.labels();
    for k in 1..=horizon {
        let step = policy.step(k);
        if step.len() != labels.len() || step.iter().any(|&a| a as usize >= num_actions) {
            return Err(Error::Shape(format!("policy step {k} does not fit the model")));
        }
    }
    let sweeper = Sweeper::new(model, labeling.transient_mask(), options.order, options.table_budget)?;
    let mut history = vec![labeling.initial_values()];
    for k in 1..=horizon {
        let prev = history.last().expect("history starts non-empty");
        let q = sweeper.sweep(prev, adversary);
        let step = policy.step(k);
        let next = labels
            .iter()
            .enumerate()
            .map(|(s, &label)| {
                let v = if label == StateLabel::Transient {
                    q[s * num_actions + step[s] as usize]
                } else {
                    0.0
                };
                clamp_terminal(label, v)
            })
            .collect();
        history.push(next);
    }
    Ok(history)
}
