//! Nonexpansive maps on ℝᵈ as expression trees.

mod certificate;
mod fixed;
mod linalg;
mod scalar;
mod verify;

pub use certificate::Certificate;
pub use fixed::fixed_set_description;
pub use linalg::{spectral_norm, Matrix};
pub use scalar::PiecewiseLinear;
pub use verify::{verify_averaged, verify_nonexpansive, VerifyOptions};

use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpr {
    Identity,
    /// `x ↦ -x`
    Negation,
    /// `x ↦ x + b`
    Translation(Vector),
    Linear(Matrix),
    /// `x ↦ Lx + b`
    Affine { linear: Matrix, shift: Vector },
    Projector(ConvexSet),
    /// `2 P_C - Id`
    Reflector(ConvexSet),
    /// `(1 - alpha) left + alpha right`
    ConvexCombination {
        alpha: f64,
        left: Box<OperatorExpr>,
        right: Box<OperatorExpr>,
    },
    /// `outer ∘ inner`
    Composition {
        outer: Box<OperatorExpr>,
        inner: Box<OperatorExpr>,
    },
    /// `½(Id + R_B R_A)`
    DouglasRachford { a: ConvexSet, b: ConvexSet },
    /// Scalar piecewise-linear map with slopes in [-1, 1].
    ScalarPiecewiseLinear(PiecewiseLinear),
    /// Scalar map `x ↦ x + scale / (1 + max(x, 0))`, `scale ∈ [0, 2]`.
    ///
    /// Its displacement `x - Tx` is negative and tends to 0 as `x → ∞`, so
    /// it has no fixed point while the infimal displacement is 0.
    ScalarVanishingDrift { scale: f64 },
}

impl OperatorExpr {
    pub fn convex_combination(alpha: f64, left: OperatorExpr, right: OperatorExpr) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "convex combination weight must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(OperatorExpr::ConvexCombination {
            alpha,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// `(1 - alpha) Id + alpha R`
    pub fn relaxed(alpha: f64, r: OperatorExpr) -> Result<Self> {
        Self::convex_combination(alpha, OperatorExpr::Identity, r)
    }

    pub fn compose(outer: OperatorExpr, inner: OperatorExpr) -> Self {
        OperatorExpr::Composition {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn douglas_rachford(a: ConvexSet, b: ConvexSet) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Ok(OperatorExpr::DouglasRachford { a, b })
    }

    pub fn vanishing_drift(scale: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&scale) {
            return Err(Error::InvalidArgument(format!(
                "drift scale must lie in [0, 2], got {scale}"
            )));
        }
        Ok(OperatorExpr::ScalarVanishingDrift { scale })
    }

    /// `½(Id + R_B R_A)` spelled out with generic nodes.
    pub fn douglas_rachford_expanded(a: ConvexSet, b: ConvexSet) -> Self {
        OperatorExpr::ConvexCombination {
            alpha: 0.5,
            left: Box::new(OperatorExpr::Identity),
            right: Box::new(OperatorExpr::compose(
                OperatorExpr::Reflector(b),
                OperatorExpr::Reflector(a),
            )),
        }
    }

    /// Ambient dimension if any node pins it down.
    pub fn dim(&self) -> Option<usize> {
        use OperatorExpr::*;
        match self {
            Identity | Negation => None,
            Translation(b) => Some(b.dim()),
            Linear(m) => Some(m.nrows()),
            Affine { shift, .. } => Some(shift.dim()),
            Projector(c) | Reflector(c) => Some(c.dim()),
            ConvexCombination { left, right, .. } => left.dim().or_else(|| right.dim()),
            Composition { outer, inner } => outer.dim().or_else(|| inner.dim()),
            DouglasRachford { a, .. } => Some(a.dim()),
            ScalarPiecewiseLinear(_) | ScalarVanishingDrift { .. } => Some(1),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        use OperatorExpr::*;
        match self {
            Identity => Ok(x.clone()),
            Negation => Ok(-x),
            Translation(b) => {
                x.expect_dim(b.dim())?;
                Ok(x + b)
            }
            Linear(m) => m.apply(x),
            Affine { linear, shift } => {
                x.expect_dim(shift.dim())?;
                Ok(&linear.apply(x)? + shift)
            }
            Projector(c) => c.project(x),
            Reflector(c) => c.reflect(x),
            ConvexCombination { alpha, left, right } => {
                let l = left.apply(x)?;
                let r = right.apply(x)?;
                l.expect_dim(r.dim())?;
                Ok(l.zip_map(&r, |l, r| (1.0 - alpha) * l + alpha * r))
            }
            Composition { outer, inner } => outer.apply(&inner.apply(x)?),
            DouglasRachford { a, b } => {
                let r = b.reflect(&a.reflect(x)?)?;
                // Same arithmetic as the expanded convex combination.
                Ok(x.zip_map(&r, |x, r| 0.5 * x + 0.5 * r))
            }
            ScalarPiecewiseLinear(f) => {
                x.expect_dim(1)?;
                Ok(Vector::scalar(f.eval(x[0])))
            }
            ScalarVanishingDrift { scale } => {
                x.expect_dim(1)?;
                let t = x[0];
                Ok(Vector::scalar(t + scale / (1.0 + t.max(0.0))))
            }
        }
    }

    /// Short human-readable form for reports.
    pub fn describe(&self) -> String {
        use OperatorExpr::*;
        match self {
            Identity => "Id".into(),
            Negation => "-Id".into(),
            Translation(b) => format!("Id + {b:?}"),
            Linear(m) => format!("Linear({}x{})", m.nrows(), m.ncols()),
            Affine { linear, .. } => format!("Affine({}x{})", linear.nrows(), linear.ncols()),
            Projector(c) => format!("P[{}]", c.kind_name()),
            Reflector(c) => format!("R[{}]", c.kind_name()),
            ConvexCombination { alpha, left, right } => {
                format!("({}*{} + {}*{})", 1.0 - alpha, left.describe(), alpha, right.describe())
            }
            Composition { outer, inner } => format!("{} o {}", outer.describe(), inner.describe()),
            DouglasRachford { a, b } => format!("DR[{}, {}]", a.kind_name(), b.kind_name()),
            ScalarPiecewiseLinear(f) => format!("PWL({} knots)", f.knots().len()),
            ScalarVanishingDrift { scale } => format!("Drift({scale})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(OperatorExpr::Negation.apply(&v(&[5.0])).unwrap(), v(&[-5.0]));
        let unit = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let dr = OperatorExpr::douglas_rachford(unit.clone(), unit).unwrap();
        assert_eq!(dr.apply(&v(&[0.5, 0.0])).unwrap(), v(&[0.5, 0.0]));
        let t = OperatorExpr::Translation(v(&[1.0, -2.0]));
        assert_eq!(t.apply(&v(&[0.5, 0.5])).unwrap(), v(&[1.5, -1.5]));
    }

    #[test]
    fn dimension_errors_propagate() {
        let t = OperatorExpr::Translation(v(&[1.0, -2.0]));
        assert!(matches!(t.apply(&v(&[1.0])), Err(Error::DimensionMismatch { .. })));
        let bad = OperatorExpr::Projector(
            ConvexSet::minkowski_sum(
                ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap(),
                ConvexSet::orthant(vec![1, 1]).unwrap(),
            )
            .unwrap(),
        );
        assert!(matches!(bad.apply(&v(&[1.0, 1.0])), Err(Error::UnsupportedSet(_))));
    }

    #[test]
    fn douglas_rachford_matches_expansion_bitwise() {
        let a = ConvexSet::ball(v(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        let b = ConvexSet::ball(v(&[5.0, 0.0, 0.0]), 1.0).unwrap();
        let dr = OperatorExpr::douglas_rachford(a.clone(), b.clone()).unwrap();
        let ex = OperatorExpr::douglas_rachford_expanded(a, b);
        let mut rng = crate::random::rng(9);
        for _ in 0..1000 {
            let x = crate::random::in_cube(&mut rng, 3, 10.0);
            assert!(dr.apply(&x).unwrap().dist(&ex.apply(&x).unwrap()) <= 1e-14);
        }
    }

    #[test]
    fn convex_combination_weight_is_checked() {
        assert!(OperatorExpr::relaxed(0.0, OperatorExpr::Negation).is_err());
        assert!(OperatorExpr::relaxed(1.0, OperatorExpr::Negation).is_err());
        assert!(OperatorExpr::vanishing_drift(2.5).is_err());
    }
}
