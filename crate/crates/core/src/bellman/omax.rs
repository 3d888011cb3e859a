use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{bound_issues, Bounds};

/// Which way the adversary resolves the ambiguity set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adversary {
    /// Inner minimization (lower bounds).
    Pessimistic,
    /// Inner maximization (upper bounds).
    Optimistic,
}

impl Adversary {
    pub fn flip(self) -> Self {
        match self {
            Adversary::Pessimistic => Adversary::Optimistic,
            Adversary::Optimistic => Adversary::Pessimistic,
        }
    }
}

/// Optimal expectation over an interval ambiguity set and a distribution
/// attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct OMaxSolution {
    pub value: f64,
    pub witness: Vec<f64>,
}

/// Exact optimum of `Σ_t values[t]·γ(t)` over the interval ambiguity set.
///
/// Starts from the lower bounds and hands the residual mass to the states in
/// ascending value order (pessimistic) or descending order (optimistic), each
/// up to its upper bound. Equal values are visited by ascending index.
pub fn o_maximization(values: &[f64], bounds: Bounds<'_>, adversary: Adversary) -> Result<OMaxSolution> {
    if values.len() != bounds.len() {
        return Err(Error::Shape(format!(
            "{} values for an ambiguity set over {} states",
            values.len(),
            bounds.len()
        )));
    }
    if let Some(issue) = bound_issues(bounds.lower, bounds.upper).first() {
        return Err(Error::InvalidAmbiguity(issue.to_string()));
    }
    let mut order = Vec::with_capacity(values.len());
    sort_order(values, adversary, &mut order);
    let mut witness = bounds.lower.to_vec();
    let value = assign_mass(values, bounds, &order, Some(&mut witness));
    Ok(OMaxSolution { value, witness })
}

/// Fills `order` with the visiting order for `adversary`. Stable, so ties
/// keep ascending index order.
#[inline]
pub(crate) fn sort_order(values: &[f64], adversary: Adversary, order: &mut Vec<usize>) {
    order.clear();
    order.extend(0..values.len());
    match adversary {
        Adversary::Pessimistic => order.sort_by(|&i, &j| values[i].total_cmp(&values[j])),
        Adversary::Optimistic => order.sort_by(|&i, &j| values[j].total_cmp(&values[i])),
    }
}

/// Core of O-maximization for a precomputed visiting order. Every caller
/// shares this routine so that alternative evaluation strategies agree bit
/// for bit.
#[inline]
pub(crate) fn assign_mass(
    values: &[f64],
    bounds: Bounds<'_>,
    order: &[usize],
    mut witness: Option<&mut Vec<f64>>,
) -> f64 {
    let mut value = 0.0;
    let mut mass = 0.0;
    for ((&v, &lo), _) in values.iter().zip(bounds.lower).zip(bounds.upper) {
        value += v * lo;
        mass += lo;
    }
    let mut remaining = 1.0 - mass;
    for &i in order {
        if remaining <= 0.0 {
            break;
        }
        let gap = bounds.upper[i] - bounds.lower[i];
        if gap <= 0.0 {
            continue;
        }
        let add = gap.min(remaining);
        value += values[i] * add;
        remaining -= add;
        if let Some(w) = witness.as_deref_mut() {
            w[i] += add;
        }
    }
    value
}

/// Returns `Some(c)` if every entry equals `c`. The optimum over any
/// ambiguity set is then exactly `c`.
#[inline]
pub(crate) fn constant_value(values: &[f64]) -> Option<f64> {
    let first = *values.first()?;
    values.iter().all(|&v| v == first).then_some(first)
}

/// One O-maximization without witness, with the constant shortcut. Used by
/// every recursive evaluator.
#[inline]
pub(crate) fn solve_values(
    values: &[f64],
    bounds: Bounds<'_>,
    adversary: Adversary,
    order: &mut Vec<usize>,
) -> f64 {
    if let Some(c) = constant_value(values) {
        return c;
    }
    sort_order(values, adversary, order);
    assign_mass(values, bounds, order, None)
}
