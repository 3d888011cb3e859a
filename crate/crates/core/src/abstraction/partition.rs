use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{StateLayout, SINK};

/// Uniform grid over one axis of the region of interest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub lower: f64,
    pub upper: f64,
    pub cells: usize,
}

impl AxisGrid {
    pub fn width(&self) -> f64 {
        (self.upper - self.lower) / self.cells as f64
    }

    /// Edge `j` for `j = 0..=cells`; the last edge is exactly `upper`.
    pub fn edge(&self, j: usize) -> f64 {
        if j == self.cells {
            self.upper
        } else {
            self.lower + j as f64 * self.width()
        }
    }

    pub fn cell(&self, j: usize) -> (f64, f64) {
        (self.edge(j), self.edge(j + 1))
    }

    /// Cell containing `x`: half-open `[edge_j, edge_{j+1})` except the last
    /// cell, which is closed. `None` outside the axis domain.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.lower && x <= self.upper) {
            return None;
        }
        let mut j = (((x - self.lower) / self.width()).floor() as usize).min(self.cells - 1);
        // correct for rounding at the edges
        while j > 0 && x < self.edge(j) {
            j -= 1;
        }
        while j + 1 < self.cells && x >= self.edge(j + 1) {
            j += 1;
        }
        Some(j)
    }

    /// True when `x` coincides with a grid edge up to `tol`.
    pub fn is_aligned(&self, x: f64, tol: f64) -> bool {
        let k = ((x - self.lower) / self.width()).round();
        (x - (self.lower + k * self.width())).abs() <= tol * self.width().max(1.0)
    }
}

/// Axis-aligned grid partition of a hyperrectangular region of interest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectPartition {
    axes: Vec<AxisGrid>,
}

/// Uniform grid with `counts[i]` cells on `region[i]`.
pub fn partition(region: &[(f64, f64)], counts: &[usize]) -> Result<RectPartition> {
    RectPartition::new(region, counts)
}

impl RectPartition {
    pub fn new(region: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if region.is_empty() || region.len() != counts.len() {
            return Err(Error::InvalidInput(format!(
                "region has {} axes but {} cell counts were given",
                region.len(),
                counts.len()
            )));
        }
        let mut axes = Vec::with_capacity(region.len());
        for (i, (&(lo, hi), &cells)) in region.iter().zip(counts).enumerate() {
            if cells == 0 {
                return Err(Error::InvalidInput(format!("axis {i} has zero cells")));
            }
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidInput(format!(
                    "axis {i} has nonpositive width: [{lo}, {hi}]"
                )));
            }
            axes.push(AxisGrid {
                lower: lo,
                upper: hi,
                cells,
            });
        }
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &AxisGrid {
        &self.axes[i]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.cells).collect()
    }

    pub fn num_cells(&self) -> usize {
        self.axes.iter().map(|a| a.cells).product()
    }

    pub fn region(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(|a| (a.lower, a.upper)).collect()
    }

    /// Joint layout of the abstraction: each axis has its sink at index 0
    /// followed by the grid cells.
    pub fn layout(&self) -> StateLayout {
        StateLayout::new(self.axes.iter().map(|a| a.cells + 1).collect())
            .expect("a valid partition has positive axis sizes")
    }

    /// Box of the cell with marginal states `coords` (sink-free).
    pub fn cell_box(&self, coords: &[usize]) -> Option<Vec<(f64, f64)>> {
        coords
            .iter()
            .zip(&self.axes)
            .map(|(&c, axis)| (c != SINK).then(|| axis.cell(c - 1)))
            .collect()
    }

    /// Abstraction map `J`: marginal states of the cell containing `x`.
    pub fn locate(&self, x: &[f64]) -> Option<Vec<usize>> {
        if x.len() != self.axes.len() {
            return None;
        }
        x.iter()
            .zip(&self.axes)
            .map(|(&xi, axis)| axis.locate(xi).map(|j| j + 1))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.axes.len()
            && x
                .iter()
                .zip(&self.axes)
                .all(|(&xi, a)| xi >= a.lower && xi <= a.upper)
    }
}
