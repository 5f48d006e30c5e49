use super::ConvexSet;
use crate::error::{Error, Result};
use crate::vector::Vector;

/// Membership of `u` in the dual cone `K^⊕ = {u : <u, k> >= 0 for all k in K}`.
///
/// `tol` bounds the admissible negativity of `<u, k>` over unit-norm `k`:
/// * ray `R+ d`: `<u, d> >= -tol`
/// * orthant with signs `s`: `s_i u_i >= -tol` for every `i` (self-dual)
/// * subspace `Y`: `‖P_Y u‖ <= tol`, i.e. `u ∈ Y^⊥`
pub fn dual_cone_contains(k: &ConvexSet, u: &Vector, tol: f64) -> Result<bool> {
    Ok(dual_cone_violation(k, u)? <= tol)
}

/// Smallest `tol` for which [`dual_cone_contains`] accepts `u` (zero or
/// negative when `u` is strictly inside).
pub fn dual_cone_violation(k: &ConvexSet, u: &Vector) -> Result<f64> {
    u.expect_dim(k.dim())?;
    match k {
        ConvexSet::Ray { base, direction } if base.max_abs() == 0.0 => Ok(-u.dot(direction)),
        ConvexSet::Orthant { signs } => Ok(signs
            .iter()
            .enumerate()
            .map(|(i, &s)| -f64::from(s) * u[i])
            .fold(f64::NEG_INFINITY, f64::max)),
        ConvexSet::LinearSubspace { .. } => Ok(k.project(u)?.norm()),
        other => Err(Error::UnsupportedSet(format!(
            "dual cone of {} is not available",
            other.kind_name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn orthant_is_self_dual() {
        let k = ConvexSet::orthant(vec![1, 1]).unwrap();
        assert!(dual_cone_contains(&k, &v(&[1.0, 1.0]), 0.0).unwrap());
        assert!(!dual_cone_contains(&k, &v(&[1.0, -1.0]), 0.0).unwrap());
    }

    #[test]
    fn subspace_dual_is_orthogonal_complement() {
        let y = ConvexSet::linear_span(2, &[v(&[0.0, 1.0])]).unwrap();
        assert!(dual_cone_contains(&y, &v(&[2.0, 0.0]), 1e-12).unwrap());
        assert!(!dual_cone_contains(&y, &v(&[2.0, 1e-3]), 1e-12).unwrap());
        assert!(!dual_cone_contains(&y, &v(&[2.0, -1e-3]), 1e-12).unwrap());
    }

    #[test]
    fn non_cones_are_rejected() {
        let shifted = ConvexSet::ray(v(&[1.0, 0.0]), v(&[1.0, 0.0])).unwrap();
        assert!(dual_cone_contains(&shifted, &v(&[1.0, 0.0]), 0.0).is_err());
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(dual_cone_contains(&ball, &v(&[1.0, 0.0]), 0.0).is_err());
    }
}
