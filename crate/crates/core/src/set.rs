//! Convex feasible sets `C = {x : g(x) <= 0}` described by a constraint
//! function, a subgradient oracle and, when available, an exact projector.

use std::fmt;
use std::sync::Arc;

use crate::error::{MviError, Result};
use crate::feasibility::{project_box, project_hyperplane_box};
use crate::point::Point;

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

pub const DEFAULT_FEAS_TOL: f64 = 1e-12;

/// Weight on the squared equality residual in the constraint function of
/// [`FeasibleSet::hyperplane_box`]. Membership then allows
/// `|sum(x) - rhs| <= sqrt(feas_tol / weight)`, i.e. 1e-9 at the default
/// tolerance. The subgradient step is independent of the weight.
pub const EQUALITY_WEIGHT: f64 = 1e6;

#[derive(Clone)]
pub struct FeasibleSet {
    dim: usize,
    constraint: ScalarFn,
    subgradient: VectorFn,
    projector: Option<VectorFn>,
    bounds: Option<(Point, Point)>,
    feas_tol: f64,
    description: String,
}

impl FeasibleSet {
    /// A set given only by a convex constraint and a subgradient oracle.
    pub fn new(
        dim: usize,
        description: impl Into<String>,
        constraint: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(MviError::EmptyPoint);
        }
        Ok(Self {
            dim,
            constraint: Arc::new(constraint),
            subgradient: Arc::new(subgradient),
            projector: None,
            bounds: None,
            feas_tol: DEFAULT_FEAS_TOL,
            description: description.into(),
        })
    }

    pub fn with_projector(
        mut self,
        projector: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        self.projector = Some(Arc::new(projector));
        self
    }

    /// Drops the exact projector so that repair falls back to subgradient steps.
    pub fn without_projector(mut self) -> Self {
        self.projector = None;
        self
    }

    /// Attaches an axis-aligned bounding box, used for sampling feasible points.
    pub fn with_bounds(mut self, lo: Point, hi: Point) -> Result<Self> {
        lo.check_dim(self.dim)?;
        hi.check_dim(self.dim)?;
        self.bounds = Some((lo, hi));
        Ok(self)
    }

    pub fn with_feas_tol(mut self, feas_tol: f64) -> Result<Self> {
        if !(feas_tol >= 0.0) {
            return Err(MviError::InvalidParameter(format!(
                "feas_tol must be nonnegative, got {feas_tol}"
            )));
        }
        self.feas_tol = feas_tol;
        Ok(self)
    }

    /// The box `lo <= x <= hi`.
    ///
    /// `g(x) = max_i max(x_i - hi_i, lo_i - x_i)`; the subgradient is the
    /// gradient of the first active piece.
    pub fn boxed(lo: Point, hi: Point) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        let dim = lo.dim();
        let (glo, ghi) = (lo.clone(), hi.clone());
        let (slo, shi) = (lo.clone(), hi.clone());
        let (plo, phi) = (lo.clone(), hi.clone());
        Self::new(
            dim,
            format!("box [{lo}, {hi}]"),
            move |x| box_pieces(&glo, &ghi, x).max_value,
            move |x| {
                let active = box_pieces(&slo, &shi, x);
                box_piece_gradient(dim, active.index)
            },
        )?
        .with_projector(move |x| {
            project_box(&plo, &phi, x).expect("box bounds validated at construction")
        })
        .with_bounds(lo, hi)
    }

    /// The slice `{x : sum(x) = rhs, lo <= x <= hi}`.
    ///
    /// The equality enters `g` as `EQUALITY_WEIGHT * (sum(x) - rhs)^2`, ahead of
    /// the box pieces. The squared form makes a subgradient feasibility step on
    /// that piece land exactly on the hyperplane; the affine form `|sum(x) - rhs|`
    /// would reflect across it indefinitely.
    pub fn hyperplane_box(lo: Point, hi: Point, rhs: f64) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        check_slice_nonempty(&lo, &hi, rhs)?;
        let dim = lo.dim();
        let (glo, ghi) = (lo.clone(), hi.clone());
        let (slo, shi) = (lo.clone(), hi.clone());
        let (plo, phi) = (lo.clone(), hi.clone());
        Self::new(
            dim,
            format!("slice sum(x) = {rhs} of box [{lo}, {hi}]"),
            move |x| {
                let s = x.sum() - rhs;
                let eq = EQUALITY_WEIGHT * s * s;
                eq.max(box_pieces(&glo, &ghi, x).max_value)
            },
            move |x| {
                let s = x.sum() - rhs;
                let eq = EQUALITY_WEIGHT * s * s;
                let active = box_pieces(&slo, &shi, x);
                if eq >= active.max_value {
                    Point::filled(dim, 2.0 * EQUALITY_WEIGHT * s)
                } else {
                    box_piece_gradient(dim, active.index)
                }
            },
        )?
        .with_projector(move |x| {
            project_hyperplane_box(&plo, &phi, rhs, x).expect("slice validated at construction")
        })
        .with_bounds(lo, hi)
    }

    /// The half-space `<normal, x> <= offset`.
    pub fn half_space(normal: Point, offset: f64) -> Result<Self> {
        let nn = normal.norm_sq();
        if nn == 0.0 {
            return Err(MviError::InvalidParameter(
                "half-space normal must be nonzero".into(),
            ));
        }
        let dim = normal.dim();
        let (gn, sn, pn) = (normal.clone(), normal.clone(), normal.clone());
        Ok(Self::new(
            dim,
            format!("half-space <{normal}, x> <= {offset}"),
            move |x| gn.dot(x).unwrap_or(f64::INFINITY) - offset,
            move |_| sn.clone(),
        )?
        .with_projector(move |x| {
            let excess = pn.dot(x).unwrap_or(0.0) - offset;
            if excess <= 0.0 {
                x.clone()
            } else {
                pn.axpy(-excess / nn, x).unwrap_or_else(|_| x.clone())
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn feas_tol(&self) -> f64 {
        self.feas_tol
    }

    pub fn bounds(&self) -> Option<(&Point, &Point)> {
        self.bounds.as_ref().map(|(lo, hi)| (lo, hi))
    }

    pub fn has_projector(&self) -> bool {
        self.projector.is_some()
    }

    /// Value of the constraint function `g`.
    pub fn constraint(&self, x: &Point) -> f64 {
        (self.constraint)(x)
    }

    /// Some element of the subdifferential of `g` at `x`.
    pub fn subgradient(&self, x: &Point) -> Point {
        (self.subgradient)(x)
    }

    /// `g(x) <= feas_tol`. Points of the wrong dimension are never members.
    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim && self.constraint(x) <= self.feas_tol
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim)?;
        match &self.projector {
            Some(p) => Ok(p(x)),
            None => Err(MviError::NoExactProjector),
        }
    }
}

impl fmt::Debug for FeasibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeasibleSet")
            .field("description", &self.description)
            .field("dim", &self.dim)
            .field("has_projector", &self.has_projector())
            .field("feas_tol", &self.feas_tol)
            .finish()
    }
}

/// `true` iff `g(x) <= feas_tol`.
pub fn membership(set: &FeasibleSet, x: &Point) -> bool {
    set.contains(x)
}

pub(crate) fn check_bounds(lo: &Point, hi: &Point) -> Result<()> {
    hi.check_dim(lo.dim())?;
    if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
        return Err(MviError::EmptySet(format!(
            "lower bound {} exceeds upper bound {} at index {i}",
            lo[i], hi[i]
        )));
    }
    Ok(())
}

pub(crate) fn check_slice_nonempty(lo: &Point, hi: &Point, rhs: f64) -> Result<()> {
    let (slo, shi) = (lo.sum(), hi.sum());
    if !(slo <= rhs && rhs <= shi) {
        return Err(MviError::EmptySet(format!(
            "sum {rhs} lies outside [{slo}, {shi}]"
        )));
    }
    Ok(())
}

struct ActivePiece {
    max_value: f64,
    index: usize,
}

// Pieces are ordered (x_0 - hi_0, lo_0 - x_0, x_1 - hi_1, ...); ties keep the
// lowest index.
fn box_pieces(lo: &Point, hi: &Point, x: &Point) -> ActivePiece {
    let mut best = ActivePiece {
        max_value: f64::NEG_INFINITY,
        index: 0,
    };
    let n = lo.dim().min(x.dim());
    for i in 0..n {
        for (k, v) in [(2 * i, x[i] - hi[i]), (2 * i + 1, lo[i] - x[i])] {
            if v > best.max_value {
                best = ActivePiece {
                    max_value: v,
                    index: k,
                };
            }
        }
    }
    best
}

fn box_piece_gradient(dim: usize, piece: usize) -> Point {
    let mut g = vec![0.0; dim];
    g[piece / 2] = if piece.is_multiple_of(2) { 1.0 } else { -1.0 };
    Point::from(g)
}
