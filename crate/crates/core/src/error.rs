use thiserror::Error;

use crate::measurement::Outcome;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("effect for outcome {outcome} is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { outcome: Outcome, min_eigenvalue: f64 },

    #[error("effects sum to more than the identity (max eigenvalue of total {max_eigenvalue:e})")]
    Overcomplete { max_eigenvalue: f64 },

    #[error("observables do not commute: {left} vs {right} (commutator norm {norm:e})")]
    NonCommuting { left: String, right: String, norm: f64 },

    #[error("post-selection has zero probability (denominator {denominator:e})")]
    ZeroDenominator { denominator: f64 },

    #[error("causal map node mismatch: {0}")]
    NodeMismatch(String),

    #[error("invalid causal tree: {0}")]
    InvalidTree(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("grid cannot resolve the packet: {0}")]
    UnresolvableScale(String),

    #[error("geometry does not fit the domain: {0}")]
    GeometryOutOfDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time step violates the stability bound: {0}")]
    StabilityViolation(String),

    #[error("visibility window is empty")]
    EmptyWindow,

    #[error("invalid eraser amplitudes: |a1|^2 + |a2|^2 = {norm_sq}")]
    InvalidAmplitudes { norm_sq: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// Numeric failures (as opposed to rejected input) map to a distinct
    /// process exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::StabilityViolation(_) | Error::ZeroDenominator { .. })
    }
}
