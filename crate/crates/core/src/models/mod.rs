//! Interval ambiguity sets and the robust Markov models built from them.

mod ambiguity;
mod footprint;
mod imdp;
mod layout;
mod mixture;
mod odimdp;

pub use ambiguity::{bound_issues, BoundIssue, Bounds, IntervalAmbiguity, PROB_TOL};
pub use footprint::{
    imdp_footprint, imdp_scalar_formula, odimdp_footprint, odimdp_scalar_formula, Footprint,
    BYTES_PER_SCALAR,
};
pub use imdp::{dense_imdp_bytes, product_imdp, product_imdp_lumped, Imdp};
pub use imdp::human_bytes;
pub use layout::{JointState, MarginalIndex, StateLayout, SINK};
pub use mixture::MixtureOdImdp;
pub use odimdp::{validate_odimdp, OdImdp, Violation, ViolationKind};

/// Any of the robust models the solvers accept.
#[derive(Clone, Copy, Debug)]
pub enum ModelRef<'a> {
    OdImdp(&'a OdImdp),
    Imdp(&'a Imdp),
    Mixture(&'a MixtureOdImdp),
}

impl<'a> ModelRef<'a> {
    pub fn num_states(&self) -> usize {
        match self {
            ModelRef::OdImdp(m) => m.num_states(),
            ModelRef::Imdp(m) => m.num_states(),
            ModelRef::Mixture(m) => m.num_states(),
        }
    }

    pub fn num_actions(&self) -> usize {
        match self {
            ModelRef::OdImdp(m) => m.num_actions(),
            ModelRef::Imdp(m) => m.num_actions(),
            ModelRef::Mixture(m) => m.num_actions(),
        }
    }
}

impl<'a> From<&'a OdImdp> for ModelRef<'a> {
    fn from(m: &'a OdImdp) -> Self {
        ModelRef::OdImdp(m)
    }
}

impl<'a> From<&'a Imdp> for ModelRef<'a> {
    fn from(m: &'a Imdp) -> Self {
        ModelRef::Imdp(m)
    }
}

impl<'a> From<&'a MixtureOdImdp> for ModelRef<'a> {
    fn from(m: &'a MixtureOdImdp) -> Self {
        ModelRef::Mixture(m)
    }
}
