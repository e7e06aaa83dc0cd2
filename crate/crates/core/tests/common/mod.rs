//! Oracles and samplers shared by the integration tests. Nothing here calls
//! into the projection code it is used to check.

#![allow(dead_code)]

use mvi_core::{FeasibleSet, Point};
use rand::Rng;

pub fn p(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

/// Uniform point in the ball of radius `r` (radius drawn uniformly, not by volume).
pub fn point_in_ball(rng: &mut impl Rng, dim: usize, r: f64) -> Point {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            let radius = rng.gen_range(0.0..=r);
            return Point::from(v.iter().map(|c| c / n * radius).collect::<Vec<_>>());
        }
    }
}

pub fn point_in_box(rng: &mut impl Rng, lo: &[f64], hi: &[f64]) -> Point {
    Point::from(
        lo.iter()
            .zip(hi)
            .map(|(&a, &b)| if a < b { rng.gen_range(a..=b) } else { a })
            .collect::<Vec<_>>(),
    )
}

/// Feasible point: uniform in the bounding box, then projected.
pub fn feasible_point(rng: &mut impl Rng, set: &FeasibleSet) -> Point {
    let (lo, hi) = set.bounds().expect("built-in sets are bounded");
    set.project(&point_in_box(rng, lo.coords(), hi.coords())).unwrap()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Brute-force projection onto `{y : sum(y) = rhs, lo <= y <= hi}`.
///
/// A coarse grid over the first `n - 1` coordinates (the last one fixed by the
/// sum) gives a feasible start; pairwise coordinate descent, which moves mass
/// between two coordinates with an exact clipped line minimisation, then
/// refines it to the optimum.
pub fn qp_oracle_slice(lo: &[f64], hi: &[f64], rhs: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    const GRID: usize = 11;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx = vec![0usize; n - 1];
    'grid: loop {
        let mut y: Vec<f64> = (0..n - 1)
            .map(|i| lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (GRID - 1) as f64)
            .collect();
        let last = rhs - y.iter().sum::<f64>();
        if lo[n - 1] <= last && last <= hi[n - 1] {
            y.push(last);
            let d = dist_sq(&y, x);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i < GRID {
                continue 'grid;
            }
            *i = 0;
        }
        break;
    }

    let mut y = match best {
        Some((_, y)) => y,
        None => {
            // Greedy fill from the lower corner.
            let mut y = lo.to_vec();
            let mut left = rhs - lo.iter().sum::<f64>();
            for i in 0..n {
                let add = left.min(hi[i] - lo[i]);
                y[i] += add;
                left -= add;
            }
            y
        }
    };

    for _ in 0..200_000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // Minimise (y_i + d - x_i)^2 + (y_j - d - x_j)^2 over feasible d.
                let d_star = ((x[i] - y[i]) - (x[j] - y[j])) / 2.0;
                let d_min = (lo[i] - y[i]).max(y[j] - hi[j]);
                let d_max = (hi[i] - y[i]).min(y[j] - lo[j]);
                let d = d_star.clamp(d_min.min(0.0), d_max.max(0.0));
                if d != 0.0 {
                    y[i] += d;
                    y[j] -= d;
                    moved = moved.max(d.abs());
                }
            }
        }
        if moved < 1e-13 {
            break;
        }
    }
    y
}

/// Independent route to the inertia bound: the positive root of
/// `xi(a) = -(1 - tau) a^2 - (1 + 2 tau) a + tau`, found by bisection.
pub fn inertia_bound_by_bisection(mu: f64) -> f64 {
    let tau = (1.0 - mu) / (1.0 + mu);
    let xi = |a: f64| -(1.0 - tau) * a * a - (1.0 + 2.0 * tau) * a + tau;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if xi(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Same root from the quadratic formula.
pub fn inertia_bound_by_quadratic(mu: f64) -> f64 {
    let tau = (1.0 - mu) / (1.0 + mu);
    ((1.0 + 8.0 * tau).sqrt() - 1.0 - 2.0 * tau) / (2.0 * (1.0 - tau))
}
