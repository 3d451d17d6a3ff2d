use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid velocity state: {0}")]
    InvalidState(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient signal: fit window holds {points} points, need at least {required}")]
    InsufficientSignal { points: usize, required: usize },

    #[error("density is not normalized (mass = {mass})")]
    NotNormalized { mass: f64 },

    #[error("density has negative values below tolerance (min = {min})")]
    NegativeDensity { min: f64 },

    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step budget exceeded: {steps} steps requested, budget {budget}")]
    StepBudget { steps: usize, budget: usize },

    #[error("quadrature domain insufficient: {0}")]
    Domain(String),

    #[error("ratio undefined: reference entropy is zero")]
    UndefinedRatio,

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
