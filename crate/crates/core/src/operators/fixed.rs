use nalgebra::DMatrix;

use super::linalg::solve_affine;
use super::OperatorExpr;
use crate::dynamics::two_ball_displacement;
use crate::geometry::ConvexSet;
use crate::vector::Vector;

/// Closed-form description of `Fix(v + T) = {x : x = v + Tx}` when one is
/// known; `None` when the set is empty or not covered by a closed form.
///
/// `v` also fixes the ambient dimension for dimension-free nodes.
pub fn fixed_set_description(op: &OperatorExpr, v: &Vector) -> Option<ConvexSet> {
    use OperatorExpr::*;
    let d = v.dim();
    if op.dim().is_some_and(|od| od != d) {
        return None;
    }
    let zero_v = v.max_abs() == 0.0;
    match op {
        // x = v + x
        Identity => zero_v.then(|| whole_space(d)),
        // x = v - x
        Negation => Some(ConvexSet::point(v.scale(0.5))),
        // x = v + x + b
        Translation(b) => ((v + b).max_abs() == 0.0).then(|| whole_space(d)),
        Linear(l) => affine_fixed_set(l.as_nalgebra(), &Vector::zeros(d), v),
        Affine { linear, shift } => affine_fixed_set(linear.as_nalgebra(), shift, v),
        Projector(c) | Reflector(c) if zero_v => Some(c.clone()),
        ConvexCombination { left, right, .. } if zero_v => match (&**left, &**right) {
            (Identity, Projector(c) | Reflector(c)) | (Projector(c) | Reflector(c), Identity) => {
                Some(c.clone())
            }
            _ => None,
        },
        DouglasRachford {
            a: ConvexSet::Ball { center: ca, radius: ra },
            b: ConvexSet::Ball { center: cb, radius: rb },
        } => two_ball_ray(ca, *ra, cb, *rb, v),
        _ => None,
    }
}

fn whole_space(d: usize) -> ConvexSet {
    ConvexSet::AffineSubspace {
        base: Vector::zeros(d),
        basis: (0..d).map(|i| Vector::unit(d, i)).collect(),
    }
}

/// `(Id - L) x = b + v`
fn affine_fixed_set(l: &DMatrix<f64>, b: &Vector, v: &Vector) -> Option<ConvexSet> {
    let n = l.nrows();
    let m = DMatrix::<f64>::identity(n, n) - l;
    let (x, null) = solve_affine(&m, &(b + v))?;
    if null.is_empty() {
        Some(ConvexSet::point(x))
    } else {
        Some(ConvexSet::AffineSubspace { base: x, basis: null })
    }
}

/// For disjoint balls and `v` the minimal displacement, the generalized
/// fixed point set contains `A ∩ (B + v) + N_{A-B}(v)`: the tangency point
/// `c_A + r_A u` plus the normal ray along `u = (c_B - c_A)/‖c_B - c_A‖`.
fn two_ball_ray(ca: &Vector, ra: f64, cb: &Vector, rb: f64, v: &Vector) -> Option<ConvexSet> {
    let a = ConvexSet::Ball { center: ca.clone(), radius: ra };
    let b = ConvexSet::Ball { center: cb.clone(), radius: rb };
    let gap = two_ball_displacement(&a, &b).ok()?;
    if gap.max_abs() == 0.0 || gap.dist(v) > 1e-6 * (1.0 + gap.norm()) {
        return None;
    }
    let u = (cb - ca).normalized()?;
    let base = ca.axpy(ra, &u);
    ConvexSet::ray(base, u).ok()
}
