//! Built-in benchmark problems and a sampling check of the VI condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MviError, Result};
use crate::operator::{SelectionContext, SelectionStrategy, SetValuedMap};
use crate::point::Point;
use crate::problem::{SolverParams, VIProblem};
use crate::set::FeasibleSet;

/// Largest tolerated `-<w, y - x>` for [`verify_solution`] to pass.
pub const VERIFY_TOL: f64 = 1e-6;

const VERIFY_SEED: u64 = 0x5eed_0f5a_3b1e;

/// Square `[0, 10]^2` with `A(x) = {(x_1^2 + t, x_2^2) : t ∈ [0, 1/5]}`.
///
/// The origin solves it: `<(t, 0), y> = t y_1 >= 0` on the square.
pub fn build_example41() -> VIProblem {
    let set = FeasibleSet::boxed(Point::zeros(2), Point::filled(2, 10.0))
        .expect("static bounds");
    let map = SetValuedMap::segment(
        "A(x) = {(x1^2 + t, x2^2) : t in [0, 0.2]}",
        |x| x.map(|c| c * c),
        Point::from(vec![1.0, 0.0]),
        0.0,
        0.2,
    )
    .expect("static segment");
    VIProblem::new("example41", set, map)
        .with_known_solution(Point::zeros(2))
        .expect("dimension 2")
}

/// Slice `{x ∈ R^4 : sum(x) = 1, -10 <= x_i <= 10}` with
/// `A(x) = {(t + x_1, x_1, x_1, x_1) : t ∈ [1/10, 1/5]}`.
///
/// On the slice `<w, d> = t d_1` for every feasible direction `d`, so the
/// solutions are exactly the feasible points with `x_1 = -10`. No single
/// known solution is recorded.
pub fn build_example42() -> VIProblem {
    let set = FeasibleSet::hyperplane_box(Point::filled(4, -10.0), Point::filled(4, 10.0), 1.0)
        .expect("static slice");
    let map = SetValuedMap::segment(
        "A(x) = {(t + x1, x1, x1, x1) : t in [0.1, 0.2]}",
        |x| Point::filled(x.dim(), x[0]),
        Point::from(vec![1.0, 0.0, 0.0, 0.0]),
        0.1,
        0.2,
    )
    .expect("static segment");
    VIProblem::new("example42", set, map)
}

pub fn example41_params() -> SolverParams {
    SolverParams::new(0.98, 0.91, 0.03, 1e-3)
}

pub fn example42_params() -> SolverParams {
    SolverParams::new(0.14, 0.10, 0.72, 1e-7)
}

pub fn example41_start() -> Point {
    Point::filled(2, 10.0)
}

pub fn example42_start() -> Point {
    Point::from(vec![1.0, 0.0, 0.0, 0.0])
}

/// Sampling check of `<w, y - x> >= 0` for all feasible `y`.
///
/// Candidates `w` are the lower, middle and upper selections from `A(x)`.
/// For each candidate the worst violation `max_y max(0, -<w, y - x>)` is
/// taken over `samples` feasible points (uniform in the bounding box, then
/// projected). The reported violation is the best candidate's; the check
/// passes when it is at most [`VERIFY_TOL`].
pub fn verify_solution(problem: &VIProblem, x: &Point, samples: usize) -> Result<(bool, f64)> {
    verify_solution_seeded(problem, x, samples, VERIFY_SEED)
}

pub fn verify_solution_seeded(
    problem: &VIProblem,
    x: &Point,
    samples: usize,
    seed: u64,
) -> Result<(bool, f64)> {
    x.check_dim(problem.dim)?;
    if samples == 0 {
        return Err(MviError::InvalidParameter("samples must be at least 1".into()));
    }
    let set = &problem.set;
    if !set.contains(x) {
        return Err(MviError::NotFeasible(set.constraint(x)));
    }
    let (lo, hi) = set.bounds().ok_or_else(|| {
        MviError::InvalidParameter("verification needs a bounded feasible set".into())
    })?;

    let candidates: Vec<Point> = [
        SelectionStrategy::LowerEnd,
        SelectionStrategy::Midpoint,
        SelectionStrategy::UpperEnd,
    ]
    .into_iter()
    .map(|s| problem.map.select(x, &SelectionContext::new(s, 0)))
    .collect();
    let mut worst = vec![0.0f64; candidates.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let raw: Vec<f64> = (0..problem.dim)
            .map(|i| {
                if lo[i] < hi[i] {
                    rng.gen_range(lo[i]..=hi[i])
                } else {
                    lo[i]
                }
            })
            .collect();
        let y = set.project(&Point::from(raw))?;
        let d = y.sub(x)?;
        for (w, worst) in candidates.iter().zip(worst.iter_mut()) {
            *worst = worst.max(-w.dot(&d)?);
        }
    }
    let best = worst.into_iter().fold(f64::INFINITY, f64::min);
    Ok((best <= VERIFY_TOL, best))
}
