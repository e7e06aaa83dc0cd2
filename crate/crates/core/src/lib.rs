//! Solver for multi-valued variational inequalities: find `x* ∈ C` and
//! `w* ∈ A(x*)` with `<w*, y - x*> >= 0` for all `y ∈ C`.
//!
//! The method is an inertial Tseng extragradient iteration with a
//! backtracking step size and subgradient-based feasibility repair. It
//! needs a single projection onto `C` per line-search probe.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod feasibility;
pub mod linesearch;
pub mod operator;
pub mod point;
pub mod problem;
pub mod problems;
pub mod residual;
pub mod set;
pub mod solver;

pub use error::{MviError, Result};
pub use feasibility::{
    procedure_a, project_box, project_hyperplane_box, repair, FeasibilityReport, RepairMethod,
};
pub use linesearch::{armijo_search, LineSearchResult, Probe};
pub use operator::{SelectionContext, SelectionStrategy, SetValuedMap};
pub use point::Point;
pub use problem::{RepairStrategy, SolverParams, VIProblem, ValidationMode};
pub use problems::{build_example41, build_example42, verify_solution};
pub use residual::{residual, scaling_bounds_check, Residual};
pub use set::{membership, FeasibleSet};
pub use solver::{
    alpha_bound, inertial_step, solve, tseng_step, validate_params, InvariantCheck,
    IterationRecord, SolveReport, SolveStatus,
};
