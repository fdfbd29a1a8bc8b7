use thiserror::Error;

/// Errors produced by the solver, scenario, metric and training layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite field")]
    NonFiniteField,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `step` is the index of the last finite snapshot.
    #[error("trajectory diverged after step {step}")]
    Diverged { step: usize },

    #[error("trajectory diverged in sample {sample} after step {step}")]
    SampleDiverged { sample: usize, step: usize },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("mode unsupported for dynamic: {0}")]
    UnsupportedMode(String),

    #[error("degenerate target")]
    DegenerateTarget,

    #[error("non-finite objective")]
    NonFiniteObjective,

    #[error("newton did not converge within {iterations} iterations")]
    NotConverged { iterations: usize, best: Vec<f64> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
