use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("unknown state `{state}` on axis `{axis}`")]
    UnknownState { axis: String, state: String },

    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("table has {expected} cells but {found} masses were supplied")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("mass {value} at cell {index} is negative or not finite")]
    InvalidMass { index: usize, value: f64 },

    #[error("mass sums to {}", trim_float(*.0))]
    Unnormalized(f64),

    #[error("state `{state}` of `{axis}` has zero probability")]
    ZeroProbability { axis: String, state: String },

    #[error("axis sets overlap on `{0}`")]
    OverlappingAxes(String),

    #[error("absolute continuity violated at state ({0})")]
    NotAbsolutelyContinuous(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("synergy needs at least two predictors, table has {0}")]
    TooFewPredictors(usize),

    #[error("expected exactly {expected} predictors, table has {found}")]
    PredictorCount { expected: usize, found: usize },

    #[error(
        "intersection information is limited to {cap} predictors (got {n}); \
         decompose pairwise instead"
    )]
    TooManyPredictors { n: usize, cap: usize },

    #[error("constraint system is inconsistent (residual {0:e})")]
    InconsistentConstraints(f64),

    #[error("feasible projection did not converge in {rounds} rounds (residual {residual:e})")]
    ProjectionFailed { rounds: usize, residual: f64 },

    #[error("objective is not finite at a feasible point")]
    NonFiniteObjective,

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A located circuit-description error, rendered as `line:col: message`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct CircuitError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl CircuitError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Shortest decimal rendering with at most nine fractional digits.
pub(crate) fn trim_float(value: f64) -> String {
    let s = format!("{value:.9}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}
