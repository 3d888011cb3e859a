//! Monte Carlo estimation of the satisfaction probability of a concrete
//! policy, with exact binomial confidence intervals.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use super::spec::ReachAvoidSpec;
use super::ConcretePolicy;
use crate::abstraction::{GaussianKernelSpec, RectPartition};
use crate::bellman::{PropertyKind, StateLabel};
use crate::error::Result;
use crate::systems::{sample_step, trajectory_rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl McEstimate {
    /// True when the confidence interval meets `[lo, hi]`.
    pub fn overlaps(&self, lo: f64, hi: f64, tol: f64) -> bool {
        self.ci_low <= hi + tol && lo - tol <= self.ci_high
    }
}

/// Clopper–Pearson interval at confidence `1 − alpha`.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("positive shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("positive shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Plays one trajectory; satisfied iff it is in `R` at some `t ≤ H` while in
/// `X \ O` at every step up to and including `t` (for safety: in `X \ O`
/// for the whole horizon).
fn run_trajectory(
    kernel: &GaussianKernelSpec,
    spec: &ReachAvoidSpec,
    policy: &ConcretePolicy<'_>,
    x0: &[f64],
    seed: u64,
    stream: u64,
) -> Result<bool> {
    let mut rng = trajectory_rng(seed, stream);
    let mut x = x0.to_vec();
    let h = spec.horizon;
    for t in 0..=h {
        if !policy.partition.contains(&x) || spec.in_avoid(&x) {
            return Ok(false);
        }
        if spec.kind == PropertyKind::ReachAvoid && spec.in_reach(&x) {
            return Ok(true);
        }
        if t == h {
            break;
        }
        let a = policy.action(&x, t)?;
        x = sample_step(kernel, &x, &kernel.inputs[a], &mut rng);
    }
    Ok(spec.kind == PropertyKind::Safety)
}

/// Estimates the satisfaction probability from `x0` with `trials`
/// independent trajectories; trajectory `i` uses stream `i` of `seed`.
pub fn monte_carlo_validate(
    kernel: &GaussianKernelSpec,
    spec: &ReachAvoidSpec,
    policy: &ConcretePolicy<'_>,
    x0: &[f64],
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| run_trajectory(kernel, spec, policy, x0, seed, i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (ci_low, ci_high) = clopper_pearson(successes, trials.max(1), 0.01);
    Ok(McEstimate {
        successes,
        trials,
        estimate: successes as f64 / trials.max(1) as f64,
        ci_low,
        ci_high,
    })
}

/// `count` points drawn uniformly from uniformly chosen transient cells.
pub fn sample_initial_states(
    part: &RectPartition,
    labels: &[StateLabel],
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let layout = part.layout();
    let transient: Vec<usize> = (0..labels.len())
        .filter(|&s| labels[s] == StateLabel::Transient)
        .collect();
    if transient.is_empty() {
        return Vec::new();
    }
    // a stream far away from the trajectory streams
    let mut rng = trajectory_rng(seed, u64::MAX);
    (0..count)
        .map(|_| {
            let s = transient[rng.random_range(0..transient.len())];
            let cell = part
                .cell_box(&layout.coords(s))
                .expect("transient states are grid cells");
            cell.iter().map(|&(l, h)| l + (h - l) * rng.random::<f64>()).collect()
        })
        .collect()
}
