use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for ordering and unit-mass checks on probability bounds.
pub const PROB_TOL: f64 = 1e-9;

/// Bounds of an interval ambiguity set over a finite support.
///
/// The set contains every distribution `γ` with `lower ≤ γ ≤ upper`
/// entrywise. It is non-empty iff `Σ lower ≤ 1 ≤ Σ upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalAmbiguity {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Borrowed view of interval bounds, used on the hot paths where bounds
/// live inside a larger dense table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<'a> {
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

/// A single way in which a pair of bound vectors fails to describe a
/// non-empty interval ambiguity set.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundIssue {
    LengthMismatch { lower: usize, upper: usize },
    EmptySupport,
    /// `lower[t] > upper[t]`, or a bound outside `[0, 1]`.
    Entry { index: usize, lower: f64, upper: f64 },
    LowerMassExceedsOne { sum: f64 },
    UpperMassBelowOne { sum: f64 },
}

impl std::fmt::Display for BoundIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundIssue::LengthMismatch { lower, upper } => {
                write!(f, "lower has {lower} entries but upper has {upper}")
            }
            BoundIssue::EmptySupport => write!(f, "empty support"),
            BoundIssue::Entry { index, lower, upper } => write!(
                f,
                "entry {index} violates 0 <= lower <= upper <= 1 (lower = {lower}, upper = {upper})"
            ),
            BoundIssue::LowerMassExceedsOne { sum } => {
                write!(f, "lower bounds exceed unit mass (sum = {sum})")
            }
            BoundIssue::UpperMassBelowOne { sum } => {
                write!(f, "upper bounds fall short of unit mass (sum = {sum})")
            }
        }
    }
}

/// Checks every interval-ambiguity invariant and returns all violations.
pub fn bound_issues(lower: &[f64], upper: &[f64]) -> Vec<BoundIssue> {
    let mut issues = Vec::new();
    if lower.len() != upper.len() {
        issues.push(BoundIssue::LengthMismatch {
            lower: lower.len(),
            upper: upper.len(),
        });
        return issues;
    }
    if lower.is_empty() {
        issues.push(BoundIssue::EmptySupport);
        return issues;
    }
    for (index, (&lo, &up)) in lower.iter().zip(upper).enumerate() {
        let ok = lo >= -PROB_TOL && up <= 1.0 + PROB_TOL && lo <= up + PROB_TOL;
        if !ok || lo.is_nan() || up.is_nan() {
            issues.push(BoundIssue::Entry {
                index,
                lower: lo,
                upper: up,
            });
        }
    }
    let lo_sum: f64 = lower.iter().sum();
    let up_sum: f64 = upper.iter().sum();
    if lo_sum > 1.0 + PROB_TOL {
        issues.push(BoundIssue::LowerMassExceedsOne { sum: lo_sum });
    }
    if up_sum < 1.0 - PROB_TOL {
        issues.push(BoundIssue::UpperMassBelowOne { sum: up_sum });
    }
    issues
}

impl IntervalAmbiguity {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let issues = bound_issues(&lower, &upper);
        if let Some(first) = issues.first() {
            return Err(Error::InvalidAmbiguity(first.to_string()));
        }
        Ok(Self { lower, upper })
    }

    /// Singleton set `{p}`.
    pub fn degenerate(p: Vec<f64>) -> Result<Self> {
        Self::new(p.clone(), p)
    }

    /// Point mass on `index` over a support of size `len`.
    pub fn point_mass(len: usize, index: usize) -> Self {
        let mut p = vec![0.0; len];
        p[index] = 1.0;
        Self {
            lower: p.clone(),
            upper: p,
        }
    }

    /// `[0, 1]` on every entry.
    pub fn unconstrained(len: usize) -> Self {
        Self {
            lower: vec![0.0; len],
            upper: vec![1.0; len],
        }
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn bounds(&self) -> Bounds<'_> {
        Bounds {
            lower: &self.lower,
            upper: &self.upper,
        }
    }

    /// True when `gamma` is a distribution inside the set, up to `tol`.
    pub fn contains(&self, gamma: &[f64], tol: f64) -> bool {
        self.bounds().contains(gamma, tol)
    }
}

impl<'a> Bounds<'a> {
    pub fn new(lower: &'a [f64], upper: &'a [f64]) -> Self {
        Self { lower, upper }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn issues(&self) -> Vec<BoundIssue> {
        bound_issues(self.lower, self.upper)
    }

    pub fn contains(&self, gamma: &[f64], tol: f64) -> bool {
        if gamma.len() != self.lower.len() {
            return false;
        }
        let sum: f64 = gamma.iter().sum();
        (sum - 1.0).abs() <= tol
            && gamma
                .iter()
                .zip(self.lower.iter().zip(self.upper))
                .all(|(&g, (&lo, &up))| g >= lo - tol && g <= up + tol)
    }

    pub fn to_owned(&self) -> IntervalAmbiguity {
        IntervalAmbiguity {
            lower: self.lower.to_vec(),
            upper: self.upper.to_vec(),
        }
    }
}
