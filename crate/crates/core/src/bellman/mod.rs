//! Robust Bellman operators and finite-horizon value iteration.

mod engine;
mod iteration;
mod omax;
mod recursive;

pub use engine::{Sweeper, DEFAULT_TABLE_BUDGET};
pub use iteration::{
    evaluate_policy, evaluate_policy_trace, value_iteration, value_iteration_trace,
    IterationOptions, IterationTrace, Labeling, Objective, Policy, PropertyKind, SpecDirection,
    StateLabel, ValueFunction, MAX_HORIZON,
};
pub use omax::{o_maximization, Adversary, OMaxSolution};
pub use recursive::{
    imdp_bellman, mixture_bellman, recursive_bellman, recursive_bellman_with_stats,
    EliminationOrder, RecursiveOutcome,
};
