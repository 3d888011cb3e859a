//! Abstraction of stochastic systems with Gaussian(-mixture) kernels into
//! orthogonally decoupled interval MDPs (odIMDPs), robust reach-avoid
//! synthesis over them, and comparison against product-bound IMDPs.

pub mod abstraction;
pub mod bellman;
pub mod error;
pub mod models;
pub mod synthesis;
pub mod systems;

pub use error::{Error, Result};
