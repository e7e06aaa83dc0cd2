use thiserror::Error;

use crate::linesearch::Probe;

pub type Result<T> = std::result::Result<T, MviError>;

#[derive(Debug, Error)]
pub enum MviError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a point needs at least one coordinate")]
    EmptyPoint,

    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feasible set is empty: {0}")]
    EmptySet(String),

    /// A vanishing subgradient at a point with positive constraint value
    /// means `min g > 0`, so the feasible set is empty.
    #[error("feasible set appears empty: subgradient vanished where g = {value:e}")]
    InfeasibleProblem { value: f64 },

    #[error("feasibility steps did not reach the set within {steps} steps")]
    BudgetExhausted { steps: usize },

    #[error("line search stalled after m = {}, lambda = {:e}", .0.m, .0.lambda)]
    LineSearchStalled(Box<Probe>),

    #[error("alpha {alpha} is not below the inertia bound {bound:.6}")]
    ParamsOutOfTheory { alpha: f64, bound: f64 },

    #[error("feasible set has no exact projector")]
    NoExactProjector,

    #[error("point is not feasible (g = {0:e})")]
    NotFeasible(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
