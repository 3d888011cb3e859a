use crate::error::{Error, Result};
use crate::models::ambiguity::{bound_issues, BoundIssue, Bounds, IntervalAmbiguity, PROB_TOL};
use crate::models::layout::{JointState, StateLayout, SINK};

/// Robust MDP whose per source-action ambiguity set is the product of one
/// interval ambiguity set per axis.
///
/// Bounds are stored densely: for each source `s` (lexicographic) and action
/// `a`, a row holding, for every axis in order, `lower[|S_i|]` followed by
/// `upper[|S_i|]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdImdp {
    layout: StateLayout,
    action_labels: Vec<String>,
    offsets: Vec<usize>,
    row_len: usize,
    data: Vec<f64>,
}

/// One violated invariant in an [`OdImdp`], located by source, action and axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub source: usize,
    pub action: usize,
    pub axis: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    Bounds(BoundIssue),
    /// A sink-containing source whose axis marginal is not a point mass on the sink.
    NonAbsorbingSink,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "source {} action {} axis {}: ",
            self.source, self.action, self.axis
        )?;
        match &self.kind {
            ViolationKind::Bounds(issue) => write!(f, "{issue}"),
            ViolationKind::NonAbsorbingSink => write!(f, "sink marginal is not absorbing"),
        }
    }
}

impl OdImdp {
    /// Builds and validates a model from a dense bound table laid out as
    /// described on the type.
    pub fn new(axis_sizes: Vec<usize>, action_labels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let model = Self::from_raw_unchecked(axis_sizes, action_labels, data)?;
        let report = model.validate();
        if let Some(first) = report.first() {
            return Err(Error::Validation {
                count: report.len(),
                first: first.to_string(),
            });
        }
        Ok(model)
    }

    /// Builds a model checking only the table shape. Use [`OdImdp::validate`]
    /// to inspect the probability invariants.
    pub fn from_raw_unchecked(
        axis_sizes: Vec<usize>,
        action_labels: Vec<String>,
        data: Vec<f64>,
    ) -> Result<Self> {
        let layout = StateLayout::new(axis_sizes)?;
        if action_labels.is_empty() {
            return Err(Error::InvalidInput("a model needs at least one action".into()));
        }
        let row_len = 2 * layout.marginal_total();
        let expected = layout
            .num_states()
            .checked_mul(action_labels.len())
            .and_then(|r| r.checked_mul(row_len))
            .ok_or_else(|| Error::InvalidInput("bound table size overflows usize".into()))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "bound table has {} entries, expected {expected}",
                data.len()
            )));
        }
        let mut offsets = Vec::with_capacity(layout.num_axes());
        let mut acc = 0;
        for &m in layout.axis_sizes() {
            offsets.push(acc);
            acc += 2 * m;
        }
        Ok(Self {
            layout,
            action_labels,
            offsets,
            row_len,
            data,
        })
    }

    /// Assembles a model from a callback producing the marginal of every
    /// `(source, action, axis)`; each marginal is checked on the way in.
    pub fn from_fn<F>(axis_sizes: Vec<usize>, action_labels: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(&JointState, usize, usize) -> IntervalAmbiguity,
    {
        let layout = StateLayout::new(axis_sizes.clone())?;
        let num_actions = action_labels.len();
        let mut data = Vec::with_capacity(layout.num_states() * num_actions * 2 * layout.marginal_total());
        for s in 0..layout.num_states() {
            let joint = layout.joint(s);
            for a in 0..num_actions {
                for (axis, &m) in layout.axis_sizes().iter().enumerate() {
                    let amb = f(&joint, a, axis);
                    if amb.len() != m {
                        return Err(Error::Shape(format!(
                            "marginal for axis {axis} has {} entries, expected {m}",
                            amb.len()
                        )));
                    }
                    data.extend_from_slice(amb.lower());
                    data.extend_from_slice(amb.upper());
                }
            }
        }
        Self::new(axis_sizes, action_labels, data)
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    pub fn num_axes(&self) -> usize {
        self.layout.num_axes()
    }

    pub fn axis_sizes(&self) -> &[usize] {
        self.layout.axis_sizes()
    }

    pub fn num_states(&self) -> usize {
        self.layout.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.action_labels.len()
    }

    pub fn action_labels(&self) -> &[String] {
        &self.action_labels
    }

    /// The raw dense bound table in canonical order.
    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, source: usize, action: usize) -> &[f64] {
        let start = (source * self.num_actions() + action) * self.row_len;
        &self.data[start..start + self.row_len]
    }

    pub fn marginal(&self, source: usize, action: usize, axis: usize) -> Bounds<'_> {
        let row = self.row(source, action);
        let m = self.layout.axis_size(axis);
        let off = self.offsets[axis];
        Bounds {
            lower: &row[off..off + m],
            upper: &row[off + m..off + 2 * m],
        }
    }

    /// Full report of invariant violations; empty when the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        for s in 0..self.num_states() {
            let coords = self.layout.coords(s);
            for a in 0..self.num_actions() {
                for (axis, &coord) in coords.iter().enumerate() {
                    let b = self.marginal(s, a, axis);
                    for issue in bound_issues(b.lower, b.upper) {
                        report.push(Violation {
                            source: s,
                            action: a,
                            axis,
                            kind: ViolationKind::Bounds(issue),
                        });
                    }
                    if coord == SINK && !is_point_mass(b, SINK) {
                        report.push(Violation {
                            source: s,
                            action: a,
                            axis,
                            kind: ViolationKind::NonAbsorbingSink,
                        });
                    }
                }
            }
        }
        report
    }
}

fn is_point_mass(b: Bounds<'_>, index: usize) -> bool {
    b.lower.iter().zip(b.upper).enumerate().all(|(t, (&lo, &up))| {
        let target = if t == index { 1.0 } else { 0.0 };
        (lo - target).abs() <= PROB_TOL && (up - target).abs() <= PROB_TOL
    })
}

/// Free-function form of [`OdImdp::validate`].
pub fn validate_odimdp(model: &OdImdp) -> Vec<Violation> {
    model.validate()
}
