//! Mapping arbitrary points into the feasible set.
//!
//! [`procedure_a`] takes subgradient steps `y <- y - 2 g(y) w / |w|^2` with
//! `w ∈ ∂g(y)` until `g(y) <= feas_tol`. Every step is Fejér with respect to
//! the set, so the output is never farther from any feasible point than the
//! input was. [`repair`] prefers an exact projector when the set has one.

use crate::error::{MviError, Result};
use crate::point::Point;
use crate::set::{check_bounds, check_slice_nonempty, FeasibleSet};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Subgradients at or below this norm are treated as zero.
pub const ZERO_SUBGRADIENT: f64 = 1e-14;

const SLICE_SUM_TOL: f64 = 1e-12;
const SLICE_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairMethod {
    AlreadyFeasible,
    ProcedureA,
    ExactProjector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub output: Point,
    pub steps: usize,
    pub method: RepairMethod,
}

impl FeasibilityReport {
    fn unchanged(x: &Point) -> Self {
        Self {
            output: x.clone(),
            steps: 0,
            method: RepairMethod::AlreadyFeasible,
        }
    }
}

pub fn procedure_a(set: &FeasibleSet, x: &Point, max_steps: usize) -> Result<FeasibilityReport> {
    x.check_dim(set.dim())?;
    if max_steps == 0 {
        return Err(MviError::InvalidParameter(
            "max_steps must be at least 1".into(),
        ));
    }
    let mut g = set.constraint(x);
    if g <= set.feas_tol() {
        return Ok(FeasibilityReport::unchanged(x));
    }
    let mut y = x.clone();
    for step in 1..=max_steps {
        let w = set.subgradient(&y);
        w.check_dim(set.dim())?;
        let ww = w.norm_sq();
        if ww.sqrt() <= ZERO_SUBGRADIENT {
            return Err(MviError::InfeasibleProblem { value: g });
        }
        y = w.axpy(-2.0 * g / ww, &y)?;
        g = set.constraint(&y);
        if g <= set.feas_tol() {
            return Ok(FeasibilityReport {
                output: y,
                steps: step,
                method: RepairMethod::ProcedureA,
            });
        }
    }
    Err(MviError::BudgetExhausted { steps: max_steps })
}

/// Feasible point `R(x)` with `|R(x) - y| <= |x - y|` for all feasible `y`.
pub fn repair(set: &FeasibleSet, x: &Point) -> Result<FeasibilityReport> {
    repair_with_budget(set, x, DEFAULT_MAX_STEPS)
}

pub fn repair_with_budget(
    set: &FeasibleSet,
    x: &Point,
    max_steps: usize,
) -> Result<FeasibilityReport> {
    x.check_dim(set.dim())?;
    if set.contains(x) {
        return Ok(FeasibilityReport::unchanged(x));
    }
    if set.has_projector() {
        return Ok(FeasibilityReport {
            output: set.project(x)?,
            steps: 0,
            method: RepairMethod::ExactProjector,
        });
    }
    procedure_a(set, x, max_steps)
}

/// Componentwise clamp of `x` into `[lo, hi]`.
pub fn project_box(lo: &Point, hi: &Point, x: &Point) -> Result<Point> {
    check_bounds(lo, hi)?;
    x.check_dim(lo.dim())?;
    Ok(Point::from(
        (0..x.dim()).map(|i| x[i].clamp(lo[i], hi[i])).collect::<Vec<_>>(),
    ))
}

/// Euclidean projection onto `{y : sum(y) = rhs, lo <= y <= hi}`.
///
/// The projection is `clamp(x - λ·1, lo, hi)` for the multiplier `λ` that
/// fixes the sum. The clamped sum is non-increasing in `λ`, so `λ` is found by
/// bisection on `[min(x - hi), max(x - lo)]`.
pub fn project_hyperplane_box(lo: &Point, hi: &Point, rhs: f64, x: &Point) -> Result<Point> {
    check_bounds(lo, hi)?;
    check_slice_nonempty(lo, hi, rhs)?;
    x.check_dim(lo.dim())?;

    let n = x.dim();
    let shifted = |lambda: f64| -> Vec<f64> {
        (0..n).map(|i| (x[i] - lambda).clamp(lo[i], hi[i])).collect()
    };
    let gap = |y: &[f64]| y.iter().sum::<f64>() - rhs;

    let inside_box = (0..n).all(|i| lo[i] <= x[i] && x[i] <= hi[i]);
    if inside_box && gap(x.coords()).abs() <= SLICE_SUM_TOL {
        return Ok(x.clone());
    }

    let mut a = (0..n).map(|i| x[i] - hi[i]).fold(f64::INFINITY, f64::min);
    let mut b = (0..n).map(|i| x[i] - lo[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut best = shifted(0.5 * (a + b));
    for _ in 0..SLICE_BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        let y = shifted(mid);
        let s = gap(&y);
        best = y;
        if s.abs() <= SLICE_SUM_TOL {
            break;
        }
        if s > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Point::from(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn square() -> FeasibleSet {
        FeasibleSet::boxed(p(&[0.0, 0.0]), p(&[10.0, 10.0])).unwrap()
    }

    fn close(a: &Point, b: &Point, tol: f64) -> bool {
        a.distance(b).unwrap() <= tol
    }

    #[test]
    fn procedure_a_leaves_feasible_points_alone() {
        let r = procedure_a(&square(), &p(&[5.0, 5.0]), 10).unwrap();
        assert_eq!(r.output, p(&[5.0, 5.0]));
        assert_eq!(r.steps, 0);
        assert_eq!(r.method, RepairMethod::AlreadyFeasible);
    }

    #[test]
    fn procedure_a_one_step_on_box() {
        // g = 1, w = (-1, 0): y_1 = (-1, 5) - 2 * 1 * (-1, 0) = (1, 5).
        let r = procedure_a(&square(), &p(&[-1.0, 5.0]), 10).unwrap();
        assert_eq!(r.output, p(&[1.0, 5.0]));
        assert_eq!(r.steps, 1);
        assert_eq!(r.method, RepairMethod::ProcedureA);
    }

    #[test]
    fn procedure_a_one_step_on_half_space() {
        let h = FeasibleSet::half_space(p(&[1.0, 0.0]), 0.0).unwrap();
        let r = procedure_a(&h, &p(&[2.0, 0.0]), 10).unwrap();
        assert_eq!(r.output, p(&[-2.0, 0.0]));
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn procedure_a_detects_empty_set() {
        // g(x) = |x|^2 + 1 > 0 everywhere; the subgradient vanishes at 0.
        let empty = FeasibleSet::new(
            1,
            "empty",
            |x| x.norm_sq() + 1.0,
            |x| x.scale(2.0),
        )
        .unwrap();
        let err = procedure_a(&empty, &p(&[0.0]), 10).unwrap_err();
        assert!(matches!(err, MviError::InfeasibleProblem { .. }));
    }

    #[test]
    fn procedure_a_reports_exhausted_budget() {
        // Reflections about 0 and 10 move a far point 20 units per two steps.
        let err = procedure_a(&square(), &p(&[-1000.0, 5.0]), 3).unwrap_err();
        assert!(matches!(err, MviError::BudgetExhausted { steps: 3 }));
        assert!(procedure_a(&square(), &p(&[1.0, 1.0]), 0).is_err());
    }

    #[test]
    fn procedure_a_squared_equality_piece_projects_exactly() {
        let slice = FeasibleSet::hyperplane_box(p(&[-10.0; 4]), p(&[10.0; 4]), 1.0).unwrap();
        let r = procedure_a(&slice, &p(&[2.0, 0.0, 0.0, 0.0]), 10).unwrap();
        assert_eq!(r.steps, 1);
        assert!(close(&r.output, &p(&[1.75, -0.25, -0.25, -0.25]), 1e-15));
    }

    #[test]
    fn repair_prefers_exact_projector() {
        let r = repair(&square(), &p(&[-1.0, 5.0])).unwrap();
        assert_eq!(r.output, p(&[0.0, 5.0]));
        assert_eq!(r.method, RepairMethod::ExactProjector);
        assert_eq!(r.steps, 0);

        let r = repair(&square().without_projector(), &p(&[-1.0, 5.0])).unwrap();
        assert_eq!(r.output, p(&[1.0, 5.0]));
        assert_eq!(r.method, RepairMethod::ProcedureA);

        let r = repair(&square(), &p(&[3.0, 4.0])).unwrap();
        assert_eq!(r.output, p(&[3.0, 4.0]));
        assert_eq!(r.method, RepairMethod::AlreadyFeasible);
    }

    #[test]
    fn box_projection() {
        let (lo, hi) = (p(&[0.0, 0.0]), p(&[10.0, 10.0]));
        assert_eq!(project_box(&lo, &hi, &p(&[12.0, -3.0])).unwrap(), p(&[10.0, 0.0]));
        assert_eq!(project_box(&lo, &hi, &p(&[5.0, 5.0])).unwrap(), p(&[5.0, 5.0]));
        assert_eq!(project_box(&lo, &hi, &p(&[0.0, 10.0])).unwrap(), p(&[0.0, 10.0]));
        assert!(project_box(&hi, &lo, &p(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn slice_projection_examples() {
        let (lo, hi) = (p(&[-10.0; 4]), p(&[10.0; 4]));
        let y = project_hyperplane_box(&lo, &hi, 1.0, &p(&[0.0; 4])).unwrap();
        assert!(close(&y, &p(&[0.25; 4]), 1e-12));

        let y = project_hyperplane_box(&lo, &hi, 1.0, &p(&[2.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(&y, &p(&[1.75, -0.25, -0.25, -0.25]), 1e-12));

        let inside = p(&[-10.0, 5.0, 3.0, 3.0]);
        assert_eq!(project_hyperplane_box(&lo, &hi, 1.0, &inside).unwrap(), inside);
    }

    #[test]
    fn slice_projection_with_active_bounds() {
        let (lo, hi) = (p(&[-10.0; 4]), p(&[10.0; 4]));
        let y = project_hyperplane_box(&lo, &hi, 1.0, &p(&[100.0, 0.0, 0.0, 0.0])).unwrap();
        // x_0 pinned at 10, the rest share the remaining -9 equally.
        assert!(close(&y, &p(&[10.0, -3.0, -3.0, -3.0]), 1e-12));
    }

    #[test]
    fn slice_projection_rejects_empty_slice() {
        let (lo, hi) = (p(&[0.0; 2]), p(&[1.0; 2]));
        assert!(matches!(
            project_hyperplane_box(&lo, &hi, 5.0, &p(&[0.0; 2])),
            Err(MviError::EmptySet(_))
        ));
    }
}
