use serde::{Deserialize, Serialize};

use super::linalg::{max_singular_value, spectral_norm, Matrix};
use super::OperatorExpr;

const POWER_STEPS: usize = 1000;
const NORM_SLACK: f64 = 1e-12;

/// What the structural calculus can prove about an operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum Certificate {
    Unknown,
    Nonexpansive,
    /// `(1 - alpha) Id + alpha R` with `R` nonexpansive, `alpha ∈ (0, 1)`.
    Averaged(f64),
    /// Averaged with `alpha = 1/2`.
    FirmlyNonexpansive,
}

impl Certificate {
    /// Canonical certificate for an averaging constant in `[0, 1]`;
    /// `0` is the identity, `1` plain nonexpansiveness.
    fn from_constant(a: Option<f64>) -> Self {
        match a {
            None => Certificate::Unknown,
            Some(a) if a >= 1.0 => Certificate::Nonexpansive,
            Some(a) if a == 0.5 || a <= 0.0 => Certificate::FirmlyNonexpansive,
            Some(a) => Certificate::Averaged(a),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Certificate::Averaged(a) => Some(*a),
            Certificate::FirmlyNonexpansive => Some(0.5),
            _ => None,
        }
    }

    pub fn is_averaged(&self) -> bool {
        self.alpha().is_some()
    }

    pub fn is_nonexpansive(&self) -> bool {
        !matches!(self, Certificate::Unknown)
    }
}

impl OperatorExpr {
    pub fn certify(&self) -> Certificate {
        Certificate::from_constant(self.averaging_constant())
    }

    /// Smallest averaging constant the rules can establish: 0 for the
    /// identity, `alpha ∈ (0, 1)` for averaged maps, 1 for nonexpansive maps.
    fn averaging_constant(&self) -> Option<f64> {
        use OperatorExpr::*;
        match self {
            Identity => Some(0.0),
            Negation | Translation(_) | Reflector(_) => Some(1.0),
            Projector(_) | DouglasRachford { .. } => Some(0.5),
            Linear(m) | Affine { linear: m, .. } => linear_constant(m),
            ConvexCombination { alpha, left, right } => {
                // (1-λ)[(1-a)I + aR] + λ[(1-b)I + bS] = (1-μ)I + μ·(nonexpansive)
                // with μ = (1-λ)a + λb.
                let a = left.averaging_constant()?;
                let b = right.averaging_constant()?;
                Some((1.0 - alpha) * a + alpha * b)
            }
            Composition { outer, inner } => {
                let a = outer.averaging_constant()?;
                let b = inner.averaging_constant()?;
                Some(match (a, b) {
                    (a, b) if a == 0.0 => b,
                    (a, b) if b == 0.0 => a,
                    (a, b) if a >= 1.0 || b >= 1.0 => 1.0,
                    (a, b) => (a + b - 2.0 * a * b) / (1.0 - a * b),
                })
            }
            // Slopes in [m, 1] give an averaged map with constant (1 - m) / 2.
            ScalarPiecewiseLinear(f) => Some((1.0 - f.min_slope()) / 2.0),
            ScalarVanishingDrift { scale } => Some(scale / 2.0),
        }
    }
}

/// `L` is `a`-averaged iff `‖L - (1-a) I‖ <= a`; the smallest such `a` is
/// found by bisection since the property is monotone in `a`.
fn linear_constant(m: &Matrix) -> Option<f64> {
    let l = m.as_nalgebra();
    if spectral_norm(l, POWER_STEPS) > 1.0 + NORM_SLACK {
        return None;
    }
    let n = l.nrows();
    let id = nalgebra::DMatrix::<f64>::identity(n, n);
    let holds = |a: f64| max_singular_value(&(l - &id * (1.0 - a))) <= a + NORM_SLACK;
    if !holds(1.0 - 1e-9) {
        return Some(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0 - 1e-9);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(if hi < 1e-9 { 0.0 } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexSet;
    use crate::vector::Vector;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    fn ball(c: &[f64], r: f64) -> ConvexSet {
        ConvexSet::ball(v(c), r).unwrap()
    }

    #[test]
    fn structural_rules() {
        let dr = OperatorExpr::douglas_rachford(ball(&[0.0; 3], 1.0), ball(&[5.0, 0.0, 0.0], 1.0)).unwrap();
        assert_eq!(dr.certify(), Certificate::FirmlyNonexpansive);
        let relaxed = OperatorExpr::relaxed(0.3, OperatorExpr::Reflector(ball(&[0.0], 1.0))).unwrap();
        assert_eq!(relaxed.certify(), Certificate::Averaged(0.3));
        assert_eq!(OperatorExpr::Negation.certify(), Certificate::Nonexpansive);
        assert_eq!(
            OperatorExpr::Projector(ball(&[0.0], 1.0)).certify(),
            Certificate::FirmlyNonexpansive
        );
        assert_eq!(OperatorExpr::Translation(v(&[1.0])).certify(), Certificate::Nonexpansive);
    }

    #[test]
    fn composition_formula() {
        let p = OperatorExpr::Projector(ball(&[0.0, 0.0], 1.0));
        let q = OperatorExpr::Projector(ball(&[1.0, 0.0], 1.0));
        // two firmly nonexpansive maps: (1/2 + 1/2 - 1/2) / (1 - 1/4) = 2/3
        match OperatorExpr::compose(p.clone(), q).certify() {
            Certificate::Averaged(a) => assert!((a - 2.0 / 3.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let n = OperatorExpr::compose(OperatorExpr::Negation, p.clone());
        assert_eq!(n.certify(), Certificate::Nonexpansive);
        assert_eq!(
            OperatorExpr::compose(OperatorExpr::Identity, p).certify(),
            Certificate::FirmlyNonexpansive
        );
    }

    #[test]
    fn linear_maps() {
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(OperatorExpr::Linear(rot).certify(), Certificate::Nonexpansive);
        let double = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(OperatorExpr::Linear(double).certify(), Certificate::Unknown);
        // 0.8 I + 0.2 Rot is 0.2-averaged.
        let l = Matrix::from_rows(&[vec![0.8, -0.2], vec![0.2, 0.8]]).unwrap();
        match OperatorExpr::Linear(l).certify() {
            Certificate::Averaged(a) => assert!((a - 0.2).abs() < 1e-9, "{a}"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            OperatorExpr::Linear(Matrix::identity(3)).certify(),
            Certificate::FirmlyNonexpansive
        );
    }

    #[test]
    fn scalar_maps() {
        let f = super::super::PiecewiseLinear::new(vec![0.0], vec![-0.5, 1.0], 0.0).unwrap();
        assert_eq!(
            OperatorExpr::ScalarPiecewiseLinear(f).certify(),
            Certificate::Averaged(0.75)
        );
        let g = super::super::PiecewiseLinear::new(vec![0.0], vec![-1.0, 1.0], 0.0).unwrap();
        assert_eq!(OperatorExpr::ScalarPiecewiseLinear(g).certify(), Certificate::Nonexpansive);
        assert_eq!(
            OperatorExpr::vanishing_drift(1.0).unwrap().certify(),
            Certificate::FirmlyNonexpansive
        );
    }
}
