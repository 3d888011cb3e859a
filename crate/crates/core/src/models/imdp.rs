use crate::error::{Error, Result};
use crate::models::ambiguity::{bound_issues, Bounds};
use crate::models::layout::SINK;
use crate::models::odimdp::OdImdp;

/// Flat interval MDP with joint-state transition bounds, stored densely as
/// `lower[|S|]` then `upper[|S|]` per source-action row.
#[derive(Clone, Debug, PartialEq)]
pub struct Imdp {
    num_states: usize,
    action_labels: Vec<String>,
    axis_sizes: Option<Vec<usize>>,
    data: Vec<f64>,
}

impl Imdp {
    pub fn new(num_states: usize, action_labels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let model = Self::from_raw_unchecked(num_states, action_labels, data)?;
        for s in 0..model.num_states {
            for a in 0..model.num_actions() {
                let b = model.bounds(s, a);
                if let Some(issue) = bound_issues(b.lower, b.upper).first() {
                    return Err(Error::Validation {
                        count: 1,
                        first: format!("source {s} action {a}: {issue}"),
                    });
                }
            }
        }
        Ok(model)
    }

    pub fn from_raw_unchecked(
        num_states: usize,
        action_labels: Vec<String>,
        data: Vec<f64>,
    ) -> Result<Self> {
        if num_states == 0 || action_labels.is_empty() {
            return Err(Error::InvalidInput(
                "an IMDP needs at least one state and one action".into(),
            ));
        }
        let expected = 2 * num_states * num_states * action_labels.len();
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "bound table has {} entries, expected {expected}",
                data.len()
            )));
        }
        Ok(Self {
            num_states,
            action_labels,
            axis_sizes: None,
            data,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.action_labels.len()
    }

    pub fn action_labels(&self) -> &[String] {
        &self.action_labels
    }

    /// Attaches the joint layout the states were enumerated in.
    pub fn with_axis_sizes(mut self, sizes: Vec<usize>) -> Result<Self> {
        if sizes.iter().product::<usize>() != self.num_states {
            return Err(Error::Shape(format!(
                "axis sizes {sizes:?} do not multiply to {} states",
                self.num_states
            )));
        }
        self.axis_sizes = Some(sizes);
        Ok(self)
    }

    /// Axis sizes of the product space this model was derived from, if any.
    pub fn axis_sizes(&self) -> Option<&[usize]> {
        self.axis_sizes.as_deref()
    }

    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    pub fn bounds(&self, source: usize, action: usize) -> Bounds<'_> {
        let n = self.num_states;
        let start = (source * self.num_actions() + action) * 2 * n;
        Bounds {
            lower: &self.data[start..start + n],
            upper: &self.data[start + n..start + 2 * n],
        }
    }
}

/// Bytes needed by a dense IMDP over `num_states` joint states.
pub fn dense_imdp_bytes(num_states: usize, num_actions: usize) -> u128 {
    2 * (num_states as u128).pow(2) * num_actions as u128 * 8
}

pub fn human_bytes(bytes: u128) -> String {
    const UNITS: [&str; 6] = ["B", "KB", "MB", "GB", "TB", "PB"];
    let mut value = bytes as f64;
    let mut unit = 0;
    while value >= 1000.0 && unit + 1 < UNITS.len() {
        value /= 1000.0;
        unit += 1;
    }
    format!("{value:.2} {}", UNITS[unit])
}

/// Multiplies the marginal interval bounds of every source-action pair into
/// joint bounds: `p(t) = ∏_i p^i(t^i)` for lower and upper alike.
///
/// Fails with [`Error::Capacity`] if the dense table exceeds `budget_bytes`.
pub fn product_imdp(model: &OdImdp, budget_bytes: u128) -> Result<Imdp> {
    let layout = model.layout();
    let num_states = layout.num_states();
    let needed = dense_imdp_bytes(num_states, model.num_actions());
    if needed > budget_bytes {
        let grid_states: usize = layout.axis_sizes().iter().map(|&m| m.saturating_sub(1)).product();
        return Err(Error::Capacity {
            what: format!(
                "dense product IMDP over {num_states} states x {} actions ({}; grid-only estimate without sinks: {})",
                model.num_actions(),
                human_bytes(needed),
                human_bytes(dense_imdp_bytes(grid_states, model.num_actions())),
            ),
            needed_bytes: needed,
            budget_bytes,
        });
    }
    let n = layout.num_axes();
    let mut data = Vec::with_capacity(2 * num_states * num_states * model.num_actions());
    let mut coords = vec![0usize; n];
    for s in 0..num_states {
        for a in 0..model.num_actions() {
            let marginals: Vec<_> = (0..n).map(|axis| model.marginal(s, a, axis)).collect();
            for pick_upper in [false, true] {
                for t in 0..num_states {
                    layout.coords_into(t, &mut coords);
                    let p: f64 = coords
                        .iter()
                        .zip(&marginals)
                        .map(|(&c, b)| if pick_upper { b.upper[c] } else { b.lower[c] })
                        .product();
                    data.push(p);
                }
            }
        }
    }
    let mut imdp = Imdp::from_raw_unchecked(num_states, model.action_labels().to_vec(), data)?;
    imdp.axis_sizes = Some(layout.axis_sizes().to_vec());
    Ok(imdp)
}

/// Product IMDP with every sink-containing target lumped into the all-sink
/// state: leaving the region gets the bounds of `1 − ∏_i (1 − γ_i(sink))`
/// and the other sink-containing targets get zero mass. All sink states
/// are absorbing, so this is the usual grid IMDP with a single exit state,
/// written over the same state indexing.
pub fn product_imdp_lumped(model: &OdImdp, budget_bytes: u128) -> Result<Imdp> {
    let mut imdp = product_imdp(model, budget_bytes)?;
    let layout = model.layout();
    let num_states = layout.num_states();
    let n = layout.num_axes();
    let exit = layout.index_of(&vec![SINK; n]);
    let sinky: Vec<bool> = (0..num_states).map(|t| layout.has_sink(t)).collect();
    let row_len = 2 * num_states;
    for s in 0..num_states {
        if sinky[s] {
            continue;
        }
        for a in 0..model.num_actions() {
            let (mut stay_lo, mut stay_hi) = (1.0, 1.0);
            for axis in 0..n {
                let b = model.marginal(s, a, axis);
                stay_lo *= 1.0 - b.upper[SINK];
                stay_hi *= 1.0 - b.lower[SINK];
            }
            let row = &mut imdp.data[(s * model.num_actions() + a) * row_len..][..row_len];
            let (lo, up) = row.split_at_mut(num_states);
            for t in (0..num_states).filter(|&t| sinky[t]) {
                lo[t] = 0.0;
                up[t] = 0.0;
            }
            lo[exit] = (1.0 - stay_hi).max(0.0);
            up[exit] = (1.0 - stay_lo).min(1.0);
        }
    }
    Ok(imdp)
}
