//! Assembly of odIMDP abstractions from a kernel and a grid.

use std::collections::HashMap;

use rayon::prelude::*;

use super::gaussian::{marginal_bounds, sink_bounds};
use super::kernel::{bound_moments, GaussianKernelSpec};
use super::moments::AxisMoments;
use super::partition::{AxisGrid, RectPartition};
use crate::error::{Error, Result};
use crate::models::{MixtureOdImdp, OdImdp, SINK};

/// Largest upper-bound raise accepted silently when repairing float sums.
pub const WIDENING_LIMIT: f64 = 1e-12;

/// Builds the odIMDP of a single-component kernel.
pub fn build_odimdp(kernel: &GaussianKernelSpec, part: &RectPartition) -> Result<OdImdp> {
    if kernel.num_components() != 1 {
        return Err(Error::Unsupported(format!(
            "build_odimdp needs one component, kernel has {}; use build_mixture",
            kernel.num_components()
        )));
    }
    build_component(kernel, 0, part)
}

/// Builds the odIMDP of mixture component `r` alone.
pub fn build_component(kernel: &GaussianKernelSpec, r: usize, part: &RectPartition) -> Result<OdImdp> {
    kernel.check()?;
    if kernel.dim() != part.dim() {
        return Err(Error::Shape(format!(
            "kernel has {} axes, partition has {}",
            kernel.dim(),
            part.dim()
        )));
    }
    let layout = part.layout();
    let n = layout.num_axes();
    let num_actions = kernel.num_inputs();
    let num_states = layout.num_states();

    // Moment boxes per (source, action, axis), interned by bit pattern: on
    // affine systems a mean row depends only on a few coordinates, so most
    // cells share their marginals.
    let mut ids = vec![u32::MAX; num_states * num_actions * n];
    let mut interned: Vec<HashMap<[u64; 4], u32>> = vec![HashMap::new(); n];
    let mut unique: Vec<Vec<AxisMoments>> = vec![Vec::new(); n];
    let mut coords = vec![0; n];
    for s in 0..num_states {
        layout.coords_into(s, &mut coords);
        let Some(cell) = part.cell_box(&coords) else {
            continue;
        };
        for (a, u) in kernel.inputs.iter().enumerate() {
            let mb = bound_moments(kernel, r, &cell, u)?;
            mb.check()?;
            for (axis, m) in mb.axes.iter().enumerate() {
                let next = unique[axis].len() as u32;
                let id = *interned[axis].entry(m.key()).or_insert_with(|| {
                    unique[axis].push(*m);
                    next
                });
                ids[(s * num_actions + a) * n + axis] = id;
            }
        }
    }

    let tables: Vec<Vec<Vec<f64>>> = unique
        .par_iter()
        .enumerate()
        .map(|(axis, ms)| {
            ms.par_iter()
                .map(|m| axis_marginal(m, part.axis(axis)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let row_len = 2 * layout.marginal_total();
    let mut data = vec![0.0; num_states * num_actions * row_len];
    data.par_chunks_mut(row_len * num_actions)
        .enumerate()
        .for_each(|(s, rows)| {
            let mut coords = vec![0; n];
            layout.coords_into(s, &mut coords);
            let absorbing = coords.contains(&SINK);
            for (a, row) in rows.chunks_mut(row_len).enumerate() {
                let mut off = 0;
                for (axis, &m) in layout.axis_sizes().iter().enumerate() {
                    let (lo, up) = row[off..off + 2 * m].split_at_mut(m);
                    if absorbing {
                        lo[coords[axis]] = 1.0;
                        up[coords[axis]] = 1.0;
                    } else {
                        let t = &tables[axis][ids[(s * num_actions + a) * n + axis] as usize];
                        lo.copy_from_slice(&t[..m]);
                        up.copy_from_slice(&t[m..]);
                    }
                    off += 2 * m;
                }
            }
        });
    OdImdp::new(layout.axis_sizes().to_vec(), kernel.labels(), data)
}

/// `lower[m]` then `upper[m]` for one axis: sink first, then each cell.
fn axis_marginal(m: &AxisMoments, grid: &AxisGrid) -> Result<Vec<f64>> {
    let len = grid.cells + 1;
    let mut lower = Vec::with_capacity(2 * len);
    let mut upper = Vec::with_capacity(len);
    let (sl, su) = sink_bounds(m, (grid.lower, grid.upper))?;
    lower.push(sl);
    upper.push(su);
    for j in 0..grid.cells {
        let (l, u) = marginal_bounds(m, grid.cell(j))?;
        lower.push(l);
        upper.push(u);
    }
    widen(&mut lower, &mut upper);
    lower.extend_from_slice(&upper);
    Ok(lower)
}

/// Repairs `Σ upper ≥ 1 ≥ Σ lower` when rounding breaks it, moving every
/// entry by the same minimal amount.
pub(crate) fn widen(lower: &mut [f64], upper: &mut [f64]) {
    let len = upper.len() as f64;
    let deficit = 1.0 - upper.iter().sum::<f64>();
    if deficit > 0.0 {
        if deficit > WIDENING_LIMIT {
            log::warn!("upper bounds short of unit mass by {deficit:e}");
        }
        let d = deficit / len + f64::EPSILON;
        upper.iter_mut().for_each(|u| *u = (*u + d).min(1.0));
    }
    let excess = lower.iter().sum::<f64>() - 1.0;
    if excess > 0.0 {
        if excess > WIDENING_LIMIT {
            log::warn!("lower bounds exceed unit mass by {excess:e}");
        }
        let d = excess / len + f64::EPSILON;
        lower.iter_mut().for_each(|l| *l = (*l - d).max(0.0));
    }
}

/// Builds every component plus interval weight bounds per source cell.
pub fn build_mixture(kernel: &GaussianKernelSpec, part: &RectPartition) -> Result<MixtureOdImdp> {
    let components = (0..kernel.num_components())
        .map(|r| build_component(kernel, r, part))
        .collect::<Result<Vec<_>>>()?;
    let layout = part.layout();
    let k = kernel.num_components();
    let num_actions = kernel.num_inputs();
    let region = part.region();
    let mut weights = Vec::with_capacity(2 * k * layout.num_states() * num_actions);
    let mut coords = vec![0; layout.num_axes()];
    for s in 0..layout.num_states() {
        layout.coords_into(s, &mut coords);
        // sink rows are absorbing in every component; any sound enclosure
        // will do, so use the whole region
        let cell = part.cell_box(&coords).unwrap_or_else(|| region.clone());
        let iv: Vec<_> = kernel.components.iter().map(|c| c.weight.enclose(&cell)).collect();
        for _ in 0..num_actions {
            weights.extend(iv.iter().map(|i| i.lo));
            weights.extend(iv.iter().map(|i| i.hi));
        }
    }
    MixtureOdImdp::new(components, weights)
}
