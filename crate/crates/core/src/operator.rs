//! Set-valued operator oracles.
//!
//! A [`SetValuedMap`] never materialises `A(x)`. It answers two queries: a
//! selection `u ∈ A(x)` chosen by a [`SelectionContext`], and the nearest
//! element of `A(y)` to a given vector.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MviError, Result};
use crate::point::Point;

type SelectFn = Arc<dyn Fn(&Point, &SelectionContext) -> Point + Send + Sync>;
type NearestFn = Arc<dyn Fn(&Point, &Point) -> Point + Send + Sync>;

/// How to pick a single element out of `A(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionStrategy {
    #[default]
    Midpoint,
    LowerEnd,
    UpperEnd,
    SeededRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionContext {
    pub strategy: SelectionStrategy,
    pub iteration: u64,
}

impl SelectionContext {
    pub fn new(strategy: SelectionStrategy, iteration: u64) -> Self {
        Self {
            strategy,
            iteration,
        }
    }

    /// Position in `[0, 1]` along a one-parameter family of values.
    ///
    /// Seeded draws depend only on `(seed, iteration)`.
    pub fn fraction(&self) -> f64 {
        match self.strategy {
            SelectionStrategy::Midpoint => 0.5,
            SelectionStrategy::LowerEnd => 0.0,
            SelectionStrategy::UpperEnd => 1.0,
            SelectionStrategy::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(self.iteration);
                rng.gen::<f64>()
            }
        }
    }

    /// Parameter value in `[lo, hi]` picked by this context.
    pub fn pick(&self, lo: f64, hi: f64) -> f64 {
        match self.strategy {
            SelectionStrategy::LowerEnd => lo,
            SelectionStrategy::UpperEnd => hi,
            _ => lo + self.fraction() * (hi - lo),
        }
    }
}

impl Default for SelectionContext {
    fn default() -> Self {
        Self::new(SelectionStrategy::Midpoint, 0)
    }
}

#[derive(Clone)]
pub struct SetValuedMap {
    select: SelectFn,
    nearest: NearestFn,
    description: String,
}

impl SetValuedMap {
    /// Builds a map from raw oracles.
    ///
    /// `select(x, ctx)` must return an element of `A(x)` and `nearest(y, u)`
    /// the element of `A(y)` closest to `u`. Neither is checked here.
    pub fn new(
        description: impl Into<String>,
        select: impl Fn(&Point, &SelectionContext) -> Point + Send + Sync + 'static,
        nearest: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self {
            select: Arc::new(select),
            nearest: Arc::new(nearest),
            description: description.into(),
        }
    }

    /// `A(x) = {f(x)}`.
    pub fn single_valued(
        description: impl Into<String>,
        f: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        let g = Arc::clone(&f);
        Self::new(description, move |x, _| f(x), move |y, _| g(y))
    }

    /// `A(x) = {base(x) + t * direction : t ∈ [t_lo, t_hi]}`.
    ///
    /// The nearest query is the metric projection onto the segment, a clamp of
    /// the implied parameter.
    pub fn segment(
        description: impl Into<String>,
        base: impl Fn(&Point) -> Point + Send + Sync + 'static,
        direction: Point,
        t_lo: f64,
        t_hi: f64,
    ) -> Result<Self> {
        if !(t_lo <= t_hi) || !t_lo.is_finite() || !t_hi.is_finite() {
            return Err(MviError::InvalidParameter(format!(
                "segment parameter range [{t_lo}, {t_hi}] is empty"
            )));
        }
        let dd = direction.norm_sq();
        if dd == 0.0 {
            return Err(MviError::InvalidParameter(
                "segment direction must be nonzero".into(),
            ));
        }
        let base = Arc::new(base);
        let base2 = Arc::clone(&base);
        let dir2 = direction.clone();
        Ok(Self::new(
            description,
            move |x, ctx| {
                let t = ctx.pick(t_lo, t_hi);
                direction
                    .axpy(t, &base(x))
                    .expect("segment direction and base share a dimension")
            },
            move |y, u| {
                let b = base2(y);
                let offset = u.sub(&b).expect("selection dimension");
                let t = (offset.dot(&dir2).expect("selection dimension") / dd).clamp(t_lo, t_hi);
                dir2.axpy(t, &b).expect("segment direction and base share a dimension")
            },
        ))
    }

    pub fn select(&self, x: &Point, ctx: &SelectionContext) -> Point {
        (self.select)(x, ctx)
    }

    pub fn nearest(&self, y: &Point, u: &Point) -> Point {
        (self.nearest)(y, u)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for SetValuedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetValuedMap")
            .field("description", &self.description)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn squares() -> SetValuedMap {
        SetValuedMap::segment(
            "squares",
            |x| x.map(|c| c * c),
            p(&[1.0, 0.0]),
            0.0,
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn strategies_pick_expected_parameters() {
        let at = |s| SelectionContext::new(s, 3).pick(0.1, 0.2);
        assert_eq!(at(SelectionStrategy::LowerEnd), 0.1);
        assert_eq!(at(SelectionStrategy::UpperEnd), 0.2);
        assert!((at(SelectionStrategy::Midpoint) - 0.15).abs() < 1e-15);
        let r = at(SelectionStrategy::SeededRandom(9));
        assert!((0.1..=0.2).contains(&r));
    }

    #[test]
    fn seeded_selection_is_reproducible() {
        let a = SelectionContext::new(SelectionStrategy::SeededRandom(42), 7);
        let b = SelectionContext::new(SelectionStrategy::SeededRandom(42), 7);
        let c = SelectionContext::new(SelectionStrategy::SeededRandom(42), 8);
        assert_eq!(a.fraction(), b.fraction());
        assert_ne!(a.fraction(), c.fraction());
    }

    #[test]
    fn segment_select_and_nearest() {
        let a = squares();
        let ctx = SelectionContext::default();
        let u = a.select(&p(&[2.0, 3.0]), &ctx);
        assert!((u[0] - 4.1).abs() < 1e-15);
        assert_eq!(u[1], 9.0);
        // Implied parameter 5.0 clamps to the upper end.
        assert_eq!(a.nearest(&p(&[0.0, 0.0]), &p(&[5.0, 1.0])), p(&[0.2, 0.0]));
        assert_eq!(a.nearest(&p(&[0.0, 0.0]), &p(&[-5.0, 1.0])), p(&[0.0, 0.0]));
    }

    #[test]
    fn segment_rejects_bad_ranges() {
        assert!(SetValuedMap::segment("x", |x| x.clone(), p(&[1.0]), 1.0, 0.0).is_err());
        assert!(SetValuedMap::segment("x", |x| x.clone(), p(&[0.0]), 0.0, 1.0).is_err());
    }

    #[test]
    fn single_valued_nearest_ignores_target() {
        let a = SetValuedMap::single_valued("const", |_| p(&[1.0, 2.0]));
        assert_eq!(a.nearest(&p(&[0.0, 0.0]), &p(&[9.0, 9.0])), p(&[1.0, 2.0]));
    }
}
