use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-axis index of the sink state. Grid cells occupy `1..|S_i|`.
pub const SINK: usize = 0;

/// A state of one marginal: either the axis sink or a grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarginalIndex {
    pub axis: usize,
    pub state: usize,
}

impl MarginalIndex {
    pub fn sink(axis: usize) -> Self {
        Self { axis, state: SINK }
    }

    /// Marginal state for zero-based grid cell `cell` on `axis`.
    pub fn cell(axis: usize, cell: usize) -> Self {
        Self {
            axis,
            state: cell + 1,
        }
    }

    pub fn is_sink(&self) -> bool {
        self.state == SINK
    }

    /// Zero-based grid cell, or `None` for the sink.
    pub fn grid_cell(&self) -> Option<usize> {
        self.state.checked_sub(1)
    }
}

/// A joint state `(s^1, …, s^n)` given by its per-axis marginal states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointState {
    pub coords: Vec<usize>,
}

impl JointState {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn marginal(&self, axis: usize) -> MarginalIndex {
        MarginalIndex {
            axis,
            state: self.coords[axis],
        }
    }

    pub fn has_sink(&self) -> bool {
        self.coords.contains(&SINK)
    }
}

/// Product state space `S = S_1 × ⋯ × S_n` with lexicographic
/// linearization, axis 0 slowest-varying.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLayout {
    axis_sizes: Vec<usize>,
    strides: Vec<usize>,
    num_states: usize,
}

impl StateLayout {
    pub fn new(axis_sizes: Vec<usize>) -> Result<Self> {
        if axis_sizes.is_empty() {
            return Err(Error::InvalidInput("a layout needs at least one axis".into()));
        }
        if axis_sizes.iter().any(|&m| m == 0) {
            return Err(Error::InvalidInput(format!(
                "axis sizes must be positive, got {axis_sizes:?}"
            )));
        }
        let mut strides = vec![1; axis_sizes.len()];
        let mut total: usize = 1;
        for i in (0..axis_sizes.len()).rev() {
            strides[i] = total;
            total = total.checked_mul(axis_sizes[i]).ok_or_else(|| {
                Error::InvalidInput(format!("state space {axis_sizes:?} overflows usize"))
            })?;
        }
        Ok(Self {
            axis_sizes,
            strides,
            num_states: total,
        })
    }

    pub fn num_axes(&self) -> usize {
        self.axis_sizes.len()
    }

    pub fn axis_sizes(&self) -> &[usize] {
        &self.axis_sizes
    }

    pub fn axis_size(&self, axis: usize) -> usize {
        self.axis_sizes[axis]
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// `Σ_i |S_i|`, the length of one source-action row of marginal bounds.
    pub fn marginal_total(&self) -> usize {
        self.axis_sizes.iter().sum()
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.axis_sizes.len());
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &stride)| c * stride)
            .sum()
    }

    pub fn coords_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &stride) in out.iter_mut().zip(&self.strides) {
            *slot = index / stride;
            index %= stride;
        }
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axis_sizes.len()];
        self.coords_into(index, &mut out);
        out
    }

    pub fn joint(&self, index: usize) -> JointState {
        JointState::new(self.coords(index))
    }

    pub fn coordinate(&self, index: usize, axis: usize) -> usize {
        (index / self.strides[axis]) % self.axis_sizes[axis]
    }

    pub fn has_sink(&self, index: usize) -> bool {
        (0..self.axis_sizes.len()).any(|axis| self.coordinate(index, axis) == SINK)
    }

    pub fn check_joint(&self, state: &JointState) -> Result<usize> {
        if state.coords.len() != self.axis_sizes.len()
            || state
                .coords
                .iter()
                .zip(&self.axis_sizes)
                .any(|(&c, &m)| c >= m)
        {
            return Err(Error::Shape(format!(
                "joint state {:?} does not fit axis sizes {:?}",
                state.coords, self.axis_sizes
            )));
        }
        Ok(self.index_of(&state.coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_axis_zero_slowest() {
        let layout = StateLayout::new(vec![2, 3]).unwrap();
        assert_eq!(layout.num_states(), 6);
        assert_eq!(layout.index_of(&[0, 2]), 2);
        assert_eq!(layout.index_of(&[1, 0]), 3);
        assert_eq!(layout.coords(5), vec![1, 2]);
        assert_eq!(layout.coordinate(4, 1), 1);
    }

    #[test]
    fn sink_detection() {
        let layout = StateLayout::new(vec![3, 3]).unwrap();
        assert!(layout.has_sink(layout.index_of(&[0, 2])));
        assert!(layout.has_sink(layout.index_of(&[2, 0])));
        assert!(!layout.has_sink(layout.index_of(&[1, 2])));
        let m = MarginalIndex::cell(1, 4);
        assert_eq!(m.state, 5);
        assert_eq!(m.grid_cell(), Some(4));
        assert!(MarginalIndex::sink(0).is_sink());
    }

    #[test]
    fn rejects_zero_axis() {
        assert!(StateLayout::new(vec![2, 0]).is_err());
        assert!(StateLayout::new(vec![]).is_err());
    }
}
