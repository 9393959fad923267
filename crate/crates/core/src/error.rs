use thiserror::Error;

use crate::split::OperatorSplit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has dimension {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    InvalidOperator { residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("probability {value:.6e} of outcome {outcome} lies outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { outcome: usize, value: f64 },

    #[error("outcome index {outcome} out of range for a measurement with {count} outcomes")]
    OutcomeIndex { outcome: usize, count: usize },

    #[error("{operation} requires a pure state and a projective measurement")]
    UnsupportedForIdentity { operation: &'static str },

    #[error("weak value of outcome {outcome} is undefined (p = {probability:.3e})")]
    UndefinedWeakValue { outcome: usize, probability: f64 },

    #[error("log-derivative of outcome {outcome} is undefined (p = {probability:.3e})")]
    UndefinedLogDerivative { outcome: usize, probability: f64 },

    #[error("finite-difference step {step:.3e} reaches a zero-probability point of outcome {outcome}")]
    StepTooLarge { outcome: usize, step: f64 },

    #[error("zero-probability mode not supported: {0}")]
    UnsupportedMode(&'static str),

    #[error("outcomes {outcomes:?} have zero overlap with the state; phase-adjusted basis uses phase 1 there")]
    DegenerateOverlap {
        outcomes: Vec<usize>,
        split: Box<OperatorSplit>,
    },

    #[error("meter grid misses probability mass {outside_mass:.3e}")]
    Grid { outside_mass: f64 },

    #[error("{identity} violated: residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    IdentityViolation {
        identity: &'static str,
        residual: f64,
        tolerance: f64,
    },
}
