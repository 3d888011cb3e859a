use serde::{Deserialize, Serialize};

use crate::bellman::omax::{solve_values, Adversary};
use crate::error::{Error, Result};
use crate::models::{Bounds, Imdp, JointState, MixtureOdImdp, OdImdp};

/// Order in which marginals are eliminated by the recursive Bellman bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EliminationOrder {
    /// Axis 0 outermost, last axis innermost.
    #[default]
    Forward,
    /// Last axis outermost, axis 0 innermost.
    Reverse,
    /// Evaluate both and keep the tighter bound.
    Best,
}

impl EliminationOrder {
    /// The single-pass axis permutations (outermost first) this order runs.
    pub fn permutations(self, n: usize) -> Vec<Vec<usize>> {
        let forward: Vec<usize> = (0..n).collect();
        let reverse: Vec<usize> = (0..n).rev().collect();
        match self {
            EliminationOrder::Forward => vec![forward],
            EliminationOrder::Reverse => vec![reverse],
            EliminationOrder::Best if n > 1 => vec![forward, reverse],
            EliminationOrder::Best => vec![forward],
        }
    }
}

/// Keeps the tighter of two sound bounds.
#[inline]
pub(crate) fn tighter(a: f64, b: f64, adversary: Adversary) -> f64 {
    match adversary {
        Adversary::Pessimistic => a.max(b),
        Adversary::Optimistic => a.min(b),
    }
}

/// Value of a recursive Bellman bound together with the number of
/// O-maximization problems solved to get it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecursiveOutcome {
    pub value: f64,
    pub omax_calls: usize,
}

/// Depth-first evaluator for one source-action pair. Per-level scratch
/// buffers are reused across calls.
pub(crate) struct RecursiveEvaluator<'m> {
    model: &'m OdImdp,
    perm: Vec<usize>,
    strides: Vec<usize>,
    buffers: Vec<Vec<f64>>,
    order: Vec<usize>,
    calls: usize,
}

impl<'m> RecursiveEvaluator<'m> {
    pub(crate) fn new(model: &'m OdImdp, perm: Vec<usize>) -> Self {
        let strides = perm.iter().map(|&ax| model.layout().strides()[ax]).collect();
        let buffers = perm
            .iter()
            .map(|&ax| vec![0.0; model.axis_sizes()[ax]])
            .collect();
        Self {
            model,
            perm,
            strides,
            buffers,
            order: Vec::new(),
            calls: 0,
        }
    }

    pub(crate) fn evaluate(
        &mut self,
        v_prev: &[f64],
        source: usize,
        action: usize,
        adversary: Adversary,
    ) -> RecursiveOutcome {
        self.calls = 0;
        let value = self.level(0, 0, v_prev, source, action, adversary);
        RecursiveOutcome {
            value,
            omax_calls: self.calls,
        }
    }

    fn level(
        &mut self,
        depth: usize,
        base: usize,
        v_prev: &[f64],
        source: usize,
        action: usize,
        adversary: Adversary,
    ) -> f64 {
        let axis = self.perm[depth];
        let stride = self.strides[depth];
        let m = self.buffers[depth].len();
        let innermost = depth + 1 == self.perm.len();
        let mut values = std::mem::take(&mut self.buffers[depth]);
        for t in 0..m {
            values[t] = if innermost {
                v_prev[base + t * stride]
            } else {
                self.level(depth + 1, base + t * stride, v_prev, source, action, adversary)
            };
        }
        let bounds = self.model.marginal(source, action, axis);
        self.calls += 1;
        let w = solve_values(&values, bounds, adversary, &mut self.order);
        self.buffers[depth] = values;
        w
    }
}

fn check_values(len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::Shape(format!(
            "value function has {len} entries, model has {expected} states"
        )));
    }
    Ok(())
}

fn check_action(action: usize, num_actions: usize) -> Result<()> {
    if action >= num_actions {
        return Err(Error::Shape(format!(
            "action {action} out of range for {num_actions} actions"
        )));
    }
    Ok(())
}

/// Recursive divide-and-conquer bound on the multilinear robust expectation
/// `opt_{γ^i ∈ Γ^i} Σ_t V(t) ∏_i γ^i(t^i)` for one source-action pair.
///
/// Marginals are eliminated one at a time: the innermost axis is optimized
/// for every fixed prefix of outer coordinates, and each outer level then
/// optimizes over the inner results. The pessimistic result is a lower bound
/// on the exact minimum; the optimistic one an upper bound on the maximum.
pub fn recursive_bellman(
    model: &OdImdp,
    v_prev: &[f64],
    source: &JointState,
    action: usize,
    adversary: Adversary,
    order: EliminationOrder,
) -> Result<f64> {
    recursive_bellman_with_stats(model, v_prev, source, action, adversary, order).map(|o| o.value)
}

/// [`recursive_bellman`] plus the O-maximization call count, summed over
/// all passes when `order` is [`EliminationOrder::Best`].
pub fn recursive_bellman_with_stats(
    model: &OdImdp,
    v_prev: &[f64],
    source: &JointState,
    action: usize,
    adversary: Adversary,
    order: EliminationOrder,
) -> Result<RecursiveOutcome> {
    check_values(v_prev.len(), model.num_states())?;
    check_action(action, model.num_actions())?;
    let s = model.layout().check_joint(source)?;
    let mut best: Option<f64> = None;
    let mut calls = 0;
    for perm in order.permutations(model.num_axes()) {
        let out = RecursiveEvaluator::new(model, perm).evaluate(v_prev, s, action, adversary);
        calls += out.omax_calls;
        best = Some(match best {
            None => out.value,
            Some(b) => tighter(b, out.value, adversary),
        });
    }
    Ok(RecursiveOutcome {
        value: best.unwrap_or(0.0),
        omax_calls: calls,
    })
}

/// Robust Bellman bound for a mixture: the recursive bound of each
/// component, combined by one O-maximization over the weight ambiguity set.
pub fn mixture_bellman(
    model: &MixtureOdImdp,
    v_prev: &[f64],
    source: &JointState,
    action: usize,
    adversary: Adversary,
    order: EliminationOrder,
) -> Result<f64> {
    let component_values = model
        .components()
        .iter()
        .map(|c| recursive_bellman(c, v_prev, source, action, adversary, order))
        .collect::<Result<Vec<_>>>()?;
    let s = model.components()[0].layout().index_of(&source.coords);
    let mut scratch = Vec::new();
    Ok(solve_values(
        &component_values,
        model.weight_bounds(s, action),
        adversary,
        &mut scratch,
    ))
}

/// Robust Bellman update of a flat IMDP: one O-maximization over the joint
/// support.
pub fn imdp_bellman(
    model: &Imdp,
    v_prev: &[f64],
    source: usize,
    action: usize,
    adversary: Adversary,
) -> Result<f64> {
    check_values(v_prev.len(), model.num_states())?;
    check_action(action, model.num_actions())?;
    if source >= model.num_states() {
        return Err(Error::Shape(format!("source {source} out of range")));
    }
    let bounds: Bounds<'_> = model.bounds(source, action);
    let mut scratch = Vec::new();
    Ok(solve_values(v_prev, bounds, adversary, &mut scratch))
}
