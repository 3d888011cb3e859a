use serde::Serialize;

use crate::models::imdp::Imdp;
use crate::models::layout::StateLayout;
use crate::models::odimdp::OdImdp;

pub const BYTES_PER_SCALAR: u128 = 8;

/// Stored-scalar accounting for a model.
///
/// `scalars` counts every stored bound over the full joint space (sink
/// states included). `grid_scalars` counts only rows whose source is a grid
/// cell, which is what a sink-free state count reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Footprint {
    pub states: u128,
    pub grid_states: u128,
    pub actions: u128,
    pub scalars: u128,
    pub bytes: u128,
    pub grid_scalars: u128,
    pub grid_bytes: u128,
}

fn grid_states(layout: &StateLayout) -> u128 {
    layout
        .axis_sizes()
        .iter()
        .map(|&m| m.saturating_sub(1) as u128)
        .product()
}

pub fn odimdp_footprint(model: &OdImdp) -> Footprint {
    let layout = model.layout();
    let states = layout.num_states() as u128;
    let grid = grid_states(layout);
    let actions = model.num_actions() as u128;
    let per_row = 2 * layout.marginal_total() as u128;
    let scalars = states * actions * per_row;
    let grid_scalars = grid * actions * per_row;
    Footprint {
        states,
        grid_states: grid,
        actions,
        scalars,
        bytes: scalars * BYTES_PER_SCALAR,
        grid_scalars,
        grid_bytes: grid_scalars * BYTES_PER_SCALAR,
    }
}

pub fn imdp_footprint(model: &Imdp) -> Footprint {
    let states = model.num_states() as u128;
    let grid = model
        .axis_sizes()
        .map(|sizes| sizes.iter().map(|&m| m.saturating_sub(1) as u128).product())
        .unwrap_or(states);
    let actions = model.num_actions() as u128;
    let scalars = 2 * states * states * actions;
    let grid_scalars = 2 * grid * grid * actions;
    Footprint {
        states,
        grid_states: grid,
        actions,
        scalars,
        bytes: scalars * BYTES_PER_SCALAR,
        grid_scalars,
        grid_bytes: grid_scalars * BYTES_PER_SCALAR,
    }
}

/// Closed form `2·|S|·|A|·n·|S|^{1/n}` for equal axis sizes. Returns `None`
/// when `num_states` is not a perfect `n`-th power.
pub fn odimdp_scalar_formula(num_states: u128, num_actions: u128, n: u32) -> Option<u128> {
    let root = integer_root(num_states, n)?;
    Some(2 * num_states * num_actions * n as u128 * root)
}

/// Closed form `2·|S|²·|A|` for a dense IMDP.
pub fn imdp_scalar_formula(num_states: u128, num_actions: u128) -> u128 {
    2 * num_states * num_states * num_actions
}

fn integer_root(value: u128, n: u32) -> Option<u128> {
    if n == 0 {
        return None;
    }
    let guess = (value as f64).powf(1.0 / n as f64).round() as u128;
    (guess.saturating_sub(1)..=guess + 1).find(|r| r.checked_pow(n) == Some(value))
}
