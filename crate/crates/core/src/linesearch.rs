//! Backtracking step-size search.
//!
//! Probes `lambda = gamma^m` for `m = 0, 1, 2, ...` and accepts the first one
//! with `lambda * |u - nu| <= mu * |w - y|`, where `y = P_C(w - lambda * u)`
//! and `nu` is the element of `A(y)` nearest to `u`. Using the nearest
//! element makes the accepted `m` the smallest one any choice of `nu` could
//! achieve.

use crate::error::{MviError, Result};
use crate::operator::SetValuedMap;
use crate::point::Point;
use crate::set::FeasibleSet;

pub const DEFAULT_MAX_M: u32 = 100;

/// One evaluated trial step.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub m: u32,
    pub lambda: f64,
    pub y: Point,
    pub nu: Point,
    /// `|r_lambda(w, u)| = |w - y|`.
    pub residual_norm: f64,
    /// `lambda * |u - nu|`.
    pub operator_change: f64,
}

impl Probe {
    pub fn accepts(&self, mu: f64) -> bool {
        self.operator_change <= mu * self.residual_norm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult {
    pub lambda: f64,
    pub m: u32,
    pub y: Point,
    pub nu: Point,
    pub residual_norm: f64,
}

impl From<Probe> for LineSearchResult {
    fn from(p: Probe) -> Self {
        Self {
            lambda: p.lambda,
            m: p.m,
            y: p.y,
            nu: p.nu,
            residual_norm: p.residual_norm,
        }
    }
}

/// `gamma^m` by repeated multiplication, matching the search loop bit for bit.
pub fn step_length(gamma: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, _| acc * gamma)
}

pub fn probe(
    set: &FeasibleSet,
    map: &SetValuedMap,
    w: &Point,
    u: &Point,
    m: u32,
    lambda: f64,
) -> Result<Probe> {
    let y = set.project(&u.axpy(-lambda, w)?)?;
    let nu = map.nearest(&y, u);
    let residual_norm = w.distance(&y)?;
    let operator_change = lambda * u.distance(&nu)?;
    Ok(Probe {
        m,
        lambda,
        y,
        nu,
        residual_norm,
        operator_change,
    })
}

/// Smallest `m <= max_m` whose probe satisfies the acceptance test.
///
/// A probe with zero residual returns at once: `w` is then a solution and the
/// caller stops. Running out of exponents yields
/// [`MviError::LineSearchStalled`] carrying the last probe.
pub fn armijo_search(
    set: &FeasibleSet,
    map: &SetValuedMap,
    w: &Point,
    u: &Point,
    mu: f64,
    gamma: f64,
    max_m: u32,
) -> Result<LineSearchResult> {
    if !(mu > 0.0 && mu < 1.0 && gamma > 0.0 && gamma < 1.0) {
        return Err(MviError::InvalidParameter(format!(
            "line search needs mu, gamma in (0, 1), got mu = {mu}, gamma = {gamma}"
        )));
    }
    w.check_dim(set.dim())?;
    u.check_dim(set.dim())?;

    let mut lambda = 1.0;
    let mut m = 0;
    loop {
        let trial = probe(set, map, w, u, m, lambda)?;
        if trial.residual_norm == 0.0 || trial.accepts(mu) {
            return Ok(trial.into());
        }
        if m >= max_m {
            return Err(MviError::LineSearchStalled(Box::new(trial)));
        }
        m += 1;
        lambda *= gamma;
    }
}
