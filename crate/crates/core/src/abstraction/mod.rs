//! Grid abstractions of Gaussian(-mixture) systems.

pub mod build;
pub mod gaussian;
pub mod kernel;
pub mod moments;
pub mod partition;

pub use build::{build_component, build_mixture, build_odimdp, WIDENING_LIMIT};
pub use gaussian::{interval_probability, marginal_bounds, outside_probability, sink_bounds};
pub use kernel::{bound_moments, GaussianComponent, GaussianKernelSpec, MeanMap, WeightMap};
pub use moments::{AxisMoments, Interval, MomentBounds};
pub use partition::{partition, AxisGrid, RectPartition};
