//! Natural residual `r_mu(x, w) = x - P_C(x - mu * w)`.
//!
//! For `w ∈ A(x)` the residual vanishes exactly when `(x, w)` solves the
//! variational inequality. It is always computed with the exact projector.

use crate::error::{MviError, Result};
use crate::point::Point;
use crate::set::FeasibleSet;

const SCALING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub vector: Point,
    pub norm: f64,
    pub mu: f64,
}

pub fn residual(set: &FeasibleSet, x: &Point, w: &Point, mu: f64) -> Result<Residual> {
    if !(mu > 0.0) {
        return Err(MviError::InvalidParameter(format!(
            "residual step must be positive, got {mu}"
        )));
    }
    let projected = set.project(&w.axpy(-mu, x)?)?;
    let vector = x.sub(&projected)?;
    Ok(Residual {
        norm: vector.norm(),
        vector,
        mu,
    })
}

/// Checks `min(1, mu) |r_1| <= |r_mu| <= max(1, mu) |r_1|` to within 1e-10.
pub fn scaling_bounds_check(set: &FeasibleSet, x: &Point, w: &Point, mu: f64) -> Result<bool> {
    let r_mu = residual(set, x, w, mu)?.norm;
    let r_1 = residual(set, x, w, 1.0)?.norm;
    let lower = mu.min(1.0) * r_1;
    let upper = mu.max(1.0) * r_1;
    Ok(lower <= r_mu + SCALING_TOL && r_mu <= upper + SCALING_TOL)
}
