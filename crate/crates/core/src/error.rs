use thiserror::Error;

/// Errors raised by model construction, abstraction and synthesis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ambiguity set: {0}")]
    InvalidAmbiguity(String),

    #[error("model validation failed with {count} violation(s); first: {first}")]
    Validation { count: usize, first: String },

    #[error("capacity exceeded: {what} needs {needed_bytes} bytes but the budget is {budget_bytes} bytes")]
    Capacity {
        what: String,
        needed_bytes: u128,
        budget_bytes: u128,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("inconsistent labeling: {0}")]
    Labeling(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
