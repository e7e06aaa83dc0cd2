//! Inertial Tseng extragradient iteration for multi-valued variational
//! inequalities.
//!
//! Each pass repairs the previous trial point into `C`, extrapolates
//! `w_n = x_n + alpha (x_n - x_{n-1})`, picks `u_n ∈ A(w_n)`, runs the
//! backtracking search for `(lambda_n, y_n, nu_n)` and corrects with
//! `x~_{n+1} = y_n - lambda_n (nu_n - u_n)`. Only one projection onto `C` is
//! made per probe; the correction step replaces the second projection of the
//! classic extragradient method.

use std::time::Instant;

use crate::error::{MviError, Result};
use crate::feasibility::{procedure_a, repair_with_budget, FeasibilityReport};
use crate::linesearch::armijo_search;
use crate::operator::SelectionContext;
use crate::point::Point;
use crate::problem::{RepairStrategy, SolverParams, VIProblem, ValidationMode};
use crate::set::FeasibleSet;

const CONTRACTION_TOL: f64 = 1e-9;
const TSENG_BOUND_TOL: f64 = 1e-12;
const LYAPUNOV_TOL: f64 = 1e-9;

pub const CHECK_FEASIBLE: &str = "feasible_iterate";
pub const CHECK_TSENG_BOUND: &str = "tseng_step_bound";
pub const CHECK_CONTRACTION: &str = "contraction";
pub const CHECK_LYAPUNOV: &str = "lyapunov_decrease";

/// Largest admissible constant inertia for a given `mu`:
/// `1 - 4 / (sqrt(8 tau + 1) + 3)` with `tau = 2 / (mu + 1) - 1`.
pub fn alpha_bound(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(MviError::InvalidParameter(format!(
            "mu must lie in (0, 1), got {mu}"
        )));
    }
    let tau = contraction_factor(mu);
    Ok(1.0 - 4.0 / ((8.0 * tau + 1.0).sqrt() + 3.0))
}

/// `tau = 2 / (mu + 1) - 1 = (1 - mu^2) / (1 + mu)^2`.
pub fn contraction_factor(mu: f64) -> f64 {
    2.0 / (mu + 1.0) - 1.0
}

pub fn inertial_step(x_n: &Point, x_prev: &Point, alpha: f64) -> Result<Point> {
    x_n.sub(x_prev)?.axpy(alpha, x_n)
}

pub fn tseng_step(y: &Point, nu: &Point, u: &Point, lambda: f64) -> Result<Point> {
    nu.sub(u)?.axpy(-lambda, y)
}

/// Checks parameter ranges and the inertia bound.
///
/// Returns the warnings produced in [`ValidationMode::Warn`].
pub fn validate_params(params: &SolverParams) -> Result<Vec<String>> {
    params.check_ranges()?;
    let mut warnings = Vec::new();
    if params.validation == ValidationMode::Off {
        return Ok(warnings);
    }
    let bound = alpha_bound(params.mu)?;
    if params.alpha >= bound {
        match params.validation {
            ValidationMode::Strict => {
                return Err(MviError::ParamsOutOfTheory {
                    alpha: params.alpha,
                    bound,
                })
            }
            ValidationMode::Warn => warnings.push(format!(
                "alpha {} exceeds bound ≈{:.4} for mu = {}",
                params.alpha, bound, params.mu
            )),
            ValidationMode::Off => {}
        }
    }
    Ok(warnings)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Right-hand side minus left-hand side; negative means violated.
    pub slack: f64,
}

impl InvariantCheck {
    fn new(name: &'static str, slack: f64, tol: f64) -> Self {
        Self {
            name,
            passed: slack >= -tol,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub x: Point,
    pub w: Point,
    pub u: Point,
    pub lambda: f64,
    pub m: u32,
    pub residual_norm: f64,
    /// Feasibility steps spent producing `x`.
    pub repair_steps: usize,
    /// Seconds since the solve started, taken at the end of the pass.
    pub wallclock: f64,
    pub checks: Vec<InvariantCheck>,
}

impl IterationRecord {
    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    LineSearchStalled,
    InfeasibleProblem,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::LineSearchStalled => "line_search_stalled",
            SolveStatus::InfeasibleProblem => "infeasible_problem",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// On convergence, the projection of the last inertial point onto `C`
    /// (the inertial point itself whenever it is feasible). Otherwise the
    /// last repaired iterate.
    pub solution: Point,
    pub final_residual: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Every invariant check that failed, with its iteration number.
    pub fn failed_checks(&self) -> Vec<(usize, &InvariantCheck)> {
        self.trace
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| (r.n, c)))
            .collect()
    }
}

enum Repaired {
    Ok(FeasibilityReport),
    Infeasible(MviError),
}

fn repair_point(set: &FeasibleSet, params: &SolverParams, x: &Point) -> Result<Repaired> {
    let outcome = match params.repair {
        RepairStrategy::Auto => repair_with_budget(set, x, params.repair_max_steps),
        RepairStrategy::ProcedureA => procedure_a(set, x, params.repair_max_steps),
    };
    match outcome {
        Ok(report) => Ok(Repaired::Ok(report)),
        Err(e @ (MviError::InfeasibleProblem { .. } | MviError::BudgetExhausted { .. })) => {
            Ok(Repaired::Infeasible(e))
        }
        Err(e) => Err(e),
    }
}

/// Runs the method from the trial points `x0`, `x1`.
///
/// Invalid input is an `Err`. Failures during the run end it with the
/// matching [`SolveStatus`] and keep the trace gathered so far.
pub fn solve(
    problem: &VIProblem,
    params: &SolverParams,
    x0: &Point,
    x1: &Point,
) -> Result<SolveReport> {
    let mut warnings = validate_params(params)?;
    let set = &problem.set;
    for x in [x0, x1] {
        x.check_dim(problem.dim)?;
        if let Some(index) = x.coords().iter().position(|c| !c.is_finite()) {
            return Err(MviError::NonFinite { index });
        }
    }
    if !set.has_projector() {
        return Err(MviError::NoExactProjector);
    }

    let start = Instant::now();
    let mut trace: Vec<IterationRecord> = Vec::new();
    let theory_holds = params.alpha < alpha_bound(params.mu)?;
    let tau = contraction_factor(params.mu);
    let delta = params.alpha * (1.0 + params.alpha) - tau * (params.alpha * params.alpha - params.alpha);

    let stop = |status: SolveStatus,
                solution: Point,
                trace: Vec<IterationRecord>,
                warnings: Vec<String>| {
        let final_residual = trace.last().map_or(f64::INFINITY, |r| r.residual_norm);
        SolveReport {
            status,
            solution,
            final_residual,
            iterations: trace.len(),
            trace,
            warnings,
        }
    };

    let mut x_prev = match repair_point(set, params, x0)? {
        Repaired::Ok(r) => r.output,
        Repaired::Infeasible(e) => {
            warnings.push(e.to_string());
            return Ok(stop(SolveStatus::InfeasibleProblem, x0.clone(), trace, warnings));
        }
    };
    let (mut x_cur, mut cur_steps) = match repair_point(set, params, x1)? {
        Repaired::Ok(r) => (r.output, r.steps),
        Repaired::Infeasible(e) => {
            warnings.push(e.to_string());
            return Ok(stop(SolveStatus::InfeasibleProblem, x_prev, trace, warnings));
        }
    };

    for n in 1..=params.max_iters {
        let w = inertial_step(&x_cur, &x_prev, params.alpha)?;
        let ctx = SelectionContext::new(params.selection, n as u64);
        let u = problem.map.select(&w, &ctx);
        u.check_dim(problem.dim)?;

        let mut record = IterationRecord {
            n,
            x: x_cur.clone(),
            w: w.clone(),
            u: u.clone(),
            lambda: 0.0,
            m: 0,
            residual_norm: f64::INFINITY,
            repair_steps: cur_steps,
            wallclock: 0.0,
            checks: Vec::new(),
        };
        if params.instrument {
            record.checks.push(InvariantCheck::new(
                CHECK_FEASIBLE,
                set.feas_tol() - set.constraint(&x_cur),
                0.0,
            ));
        }

        let ls = match armijo_search(
            set,
            &problem.map,
            &w,
            &u,
            params.mu,
            params.gamma,
            params.max_linesearch,
        ) {
            Ok(ls) => ls,
            Err(MviError::LineSearchStalled(last)) => {
                record.lambda = last.lambda;
                record.m = last.m;
                record.residual_norm = last.residual_norm;
                record.wallclock = start.elapsed().as_secs_f64();
                warnings.push(format!(
                    "line search stalled at iteration {n} (m = {}, residual {:e})",
                    last.m, last.residual_norm
                ));
                trace.push(record);
                return Ok(stop(SolveStatus::LineSearchStalled, x_cur, trace, warnings));
            }
            Err(e) => return Err(e),
        };
        record.lambda = ls.lambda;
        record.m = ls.m;
        record.residual_norm = ls.residual_norm;

        if ls.residual_norm <= params.epsilon {
            record.wallclock = start.elapsed().as_secs_f64();
            trace.push(record);
            let solution = if set.contains(&w) { w } else { set.project(&w)? };
            return Ok(stop(SolveStatus::Converged, solution, trace, warnings));
        }

        let trial = tseng_step(&ls.y, &ls.nu, &u, ls.lambda)?;
        let next = match repair_point(set, params, &trial)? {
            Repaired::Ok(r) => r,
            Repaired::Infeasible(e) => {
                record.wallclock = start.elapsed().as_secs_f64();
                warnings.push(e.to_string());
                trace.push(record);
                return Ok(stop(SolveStatus::InfeasibleProblem, x_cur, trace, warnings));
            }
        };

        if params.instrument {
            let step = trial.distance(&w)?;
            record.checks.push(InvariantCheck::new(
                CHECK_TSENG_BOUND,
                ls.residual_norm - step / (1.0 + params.mu),
                TSENG_BOUND_TOL,
            ));
            if let Some(star) = &problem.known_solution {
                let d_next = next.output.distance(star)?.powi(2);
                let d_w = w.distance(star)?.powi(2);
                let rhs = d_w - (1.0 - params.mu * params.mu) * ls.residual_norm.powi(2);
                record.checks.push(InvariantCheck::new(
                    CHECK_CONTRACTION,
                    rhs - d_next,
                    CONTRACTION_TOL,
                ));
                if theory_holds {
                    let phi = |a: &Point, b: &Point| -> Result<f64> {
                        Ok(a.distance(star)?.powi(2) - params.alpha * b.distance(star)?.powi(2)
                            + delta * a.distance(b)?.powi(2))
                    };
                    let change = phi(&next.output, &x_cur)? - phi(&x_cur, &x_prev)?;
                    record
                        .checks
                        .push(InvariantCheck::new(CHECK_LYAPUNOV, -change, LYAPUNOV_TOL));
                }
            }
        }
        record.wallclock = start.elapsed().as_secs_f64();
        trace.push(record);

        x_prev = std::mem::replace(&mut x_cur, next.output);
        cur_steps = next.steps;
    }

    Ok(stop(SolveStatus::MaxIters, x_cur, trace, warnings))
}
