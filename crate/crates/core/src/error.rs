use thiserror::Error;

use crate::adaptive::SessionTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (need p >= 2)")]
    Dimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid rotation indices ({i}, {j}) for p = {p}")]
    Index { p: usize, i: usize, j: usize },

    #[error("{0}")]
    Domain(String),

    #[error("no perturbation found after {attempts} attempts")]
    MaxAttemptsExceeded { attempts: usize },

    #[error("slice sizes sum to {sum}, expected {n}")]
    SizeMismatch { sum: usize, n: usize },

    #[error("candidate list is empty")]
    EmptyCandidates,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("points {0} and {1} share coordinate {2}; criterion is infinite")]
    InfiniteCriterion(usize, usize, usize),

    #[error("gaussian process fit failed: {0}")]
    Fit(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid session state: {0}")]
    State(String),

    #[error("density criterion vanishes; energy is singular")]
    SingularDensity,

    #[error("objective evaluation failed: {0}")]
    Evaluator(String),

    #[error("candidate pool exhausted after {completed} runs")]
    PoolExhausted { completed: usize, partial: Box<SessionTrace> },

    #[error("session aborted after {completed} runs: {source}")]
    Aborted { completed: usize, source: Box<Error>, partial: Box<SessionTrace> },
}

impl Error {
    /// Partial session trace carried by session-level failures.
    pub fn partial_trace(&self) -> Option<&SessionTrace> {
        match self {
            Error::PoolExhausted { partial, .. } | Error::Aborted { partial, .. } => Some(partial),
            _ => None,
        }
    }
}
