use crate::error::{MviError, Result};
use crate::operator::{SelectionStrategy, SetValuedMap};
use crate::point::Point;
use crate::set::FeasibleSet;

/// A multi-valued variational inequality: find `x* ∈ C` and `w* ∈ A(x*)`
/// with `<w*, y - x*> >= 0` for every `y ∈ C`.
#[derive(Debug, Clone)]
pub struct VIProblem {
    pub set: FeasibleSet,
    pub map: SetValuedMap,
    pub dim: usize,
    /// A point of the solution set, used only for diagnostics.
    pub known_solution: Option<Point>,
    pub name: String,
}

impl VIProblem {
    pub fn new(name: impl Into<String>, set: FeasibleSet, map: SetValuedMap) -> Self {
        Self {
            dim: set.dim(),
            set,
            map,
            known_solution: None,
            name: name.into(),
        }
    }

    pub fn with_known_solution(mut self, x: Point) -> Result<Self> {
        x.check_dim(self.dim)?;
        self.known_solution = Some(x);
        Ok(self)
    }
}

/// What to do when `alpha` is not below the inertia bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationMode {
    Strict,
    #[default]
    Warn,
    Off,
}

/// How iterates are brought back into the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepairStrategy {
    /// Exact projector when the set has one, subgradient steps otherwise.
    #[default]
    Auto,
    /// Always use subgradient feasibility steps.
    ProcedureA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Line-search ratio, in (0, 1).
    pub mu: f64,
    /// Backtracking factor, in (0, 1).
    pub gamma: f64,
    /// Constant inertia coefficient.
    pub alpha: f64,
    /// Stop once the residual norm drops to this value.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Largest backtracking exponent tried before giving up.
    pub max_linesearch: u32,
    pub validation: ValidationMode,
    pub selection: SelectionStrategy,
    pub repair: RepairStrategy,
    pub repair_max_steps: usize,
    /// Evaluate per-iteration invariant checks.
    pub instrument: bool,
}

impl SolverParams {
    pub const DEFAULT_MAX_ITERS: usize = 10_000;
    pub const DEFAULT_MAX_LINESEARCH: u32 = 100;
    pub const DEFAULT_REPAIR_STEPS: usize = 10_000;

    pub fn new(mu: f64, gamma: f64, alpha: f64, epsilon: f64) -> Self {
        Self {
            mu,
            gamma,
            alpha,
            epsilon,
            max_iters: Self::DEFAULT_MAX_ITERS,
            max_linesearch: Self::DEFAULT_MAX_LINESEARCH,
            validation: ValidationMode::default(),
            selection: SelectionStrategy::default(),
            repair: RepairStrategy::default(),
            repair_max_steps: Self::DEFAULT_REPAIR_STEPS,
            instrument: true,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_selection(mut self, selection: SelectionStrategy) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_validation(mut self, validation: ValidationMode) -> Self {
        self.validation = validation;
        self
    }

    /// Range checks that hold regardless of the validation mode.
    pub(crate) fn check_ranges(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.mu) {
            return Err(invalid(format!("mu must lie in (0, 1), got {}", self.mu)));
        }
        if !open_unit(self.gamma) {
            return Err(invalid(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(invalid(format!(
                "alpha must be nonnegative, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 || self.max_linesearch == 0 || self.repair_max_steps == 0 {
            return Err(invalid("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

fn invalid(msg: String) -> MviError {
    MviError::InvalidParameter(msg)
}
