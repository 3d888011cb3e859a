use crate::error::{Error, Result};
use crate::models::ambiguity::{bound_issues, Bounds};
use crate::models::odimdp::OdImdp;

/// Mixture of `K` odIMDPs sharing one state/action layout, with an interval
/// ambiguity set over the mixture weights for every source-action pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureOdImdp {
    components: Vec<OdImdp>,
    /// Per row `(s, a)`: `lower[K]` then `upper[K]`.
    weights: Vec<f64>,
}

impl MixtureOdImdp {
    pub fn new(components: Vec<OdImdp>, weights: Vec<f64>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidInput("a mixture needs at least one component".into()))?;
        for (r, c) in components.iter().enumerate().skip(1) {
            if c.axis_sizes() != first.axis_sizes() || c.num_actions() != first.num_actions() {
                return Err(Error::Shape(format!(
                    "component {r} layout differs from component 0"
                )));
            }
        }
        let k = components.len();
        let rows = first.num_states() * first.num_actions();
        if weights.len() != 2 * k * rows {
            return Err(Error::Shape(format!(
                "weight table has {} entries, expected {}",
                weights.len(),
                2 * k * rows
            )));
        }
        let model = Self {
            components,
            weights,
        };
        for row in 0..rows {
            let b = model.weight_row(row);
            if let Some(issue) = bound_issues(b.lower, b.upper).first() {
                return Err(Error::Validation {
                    count: 1,
                    first: format!("weights of row {row}: {issue}"),
                });
            }
        }
        Ok(model)
    }

    /// Mixture with the same degenerate weights on every row.
    pub fn with_constant_weights(components: Vec<OdImdp>, weights: &[f64]) -> Result<Self> {
        let rows = components
            .first()
            .map(|c| c.num_states() * c.num_actions())
            .unwrap_or(0);
        let mut table = Vec::with_capacity(2 * weights.len() * rows);
        for _ in 0..rows {
            table.extend_from_slice(weights);
            table.extend_from_slice(weights);
        }
        Self::new(components, table)
    }

    pub fn components(&self) -> &[OdImdp] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_states(&self) -> usize {
        self.components[0].num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.components[0].num_actions()
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.weights
    }

    fn weight_row(&self, row: usize) -> Bounds<'_> {
        let k = self.components.len();
        let start = row * 2 * k;
        Bounds {
            lower: &self.weights[start..start + k],
            upper: &self.weights[start + k..start + 2 * k],
        }
    }

    pub fn weight_bounds(&self, source: usize, action: usize) -> Bounds<'_> {
        self.weight_row(source * self.num_actions() + action)
    }
}
