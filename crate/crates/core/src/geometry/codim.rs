use serde::{Deserialize, Serialize};

use super::ConvexSet;
use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimResult {
    /// Dimension of the direction space of the affine hull.
    pub dim_aff: usize,
    pub codim: usize,
}

/// Modified Gram-Schmidt. Vectors whose residual norm falls below
/// `drop_tol` (relative to their original norm) are discarded.
pub fn orthonormalize(vectors: &[Vector], drop_tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut r = v.clone();
        // Two passes keep the basis orthonormal to ~1e-16.
        for _ in 0..2 {
            for e in &basis {
                r = r.axpy(-r.dot(e), e);
            }
        }
        let n = r.norm();
        if n > drop_tol * scale {
            basis.push(r.scale(1.0 / n));
        }
    }
    basis
}

/// Vectors spanning `aff C - aff C`.
fn direction_spanning(set: &ConvexSet) -> Vec<Vector> {
    use ConvexSet::*;
    let d = set.dim();
    let all = || (0..d).map(|i| Vector::unit(d, i)).collect::<Vec<_>>();
    match set {
        Point { .. } => Vec::new(),
        Ball { .. } | Halfspace { .. } | Orthant { .. } => all(),
        Hyperplane { normal, .. } => {
            let mut seed = vec![normal.clone()];
            seed.extend(all());
            orthonormalize(&seed, 1e-10).into_iter().skip(1).collect()
        }
        AffineSubspace { basis, .. } | LinearSubspace { basis, .. } => basis.clone(),
        Box { lower, upper } => (0..d)
            .filter(|&i| lower[i] < upper[i])
            .map(|i| Vector::unit(d, i))
            .collect(),
        Ray { direction, .. } => vec![direction.clone()],
        MinkowskiSum { e, k } => {
            let mut v = direction_spanning(e);
            v.extend(direction_spanning(k));
            v
        }
    }
}

/// Codimension of the affine hull of `set` in ℝ^ambient_dim.
pub fn codimension(set: &ConvexSet, ambient_dim: usize) -> Result<CodimResult> {
    if set.dim() != ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: ambient_dim,
            found: set.dim(),
        });
    }
    let dim_aff = orthonormalize(&direction_spanning(set), 1e-10).len();
    Ok(CodimResult {
        dim_aff,
        codim: ambient_dim - dim_aff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn axis_origin_and_ball() {
        let axis = ConvexSet::hyperplane(v(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(codimension(&axis, 2).unwrap().codim, 1);
        let origin = ConvexSet::point(v(&[0.0, 0.0]));
        assert_eq!(codimension(&origin, 2).unwrap().codim, 2);
        let ball = ConvexSet::ball(v(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        assert_eq!(codimension(&ball, 3).unwrap().codim, 0);
    }

    #[test]
    fn variants() {
        let ray = ConvexSet::ray(v(&[1.0, 2.0, 3.0]), v(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(codimension(&ray, 3).unwrap().codim, 2);
        let flat_box = ConvexSet::boxed(v(&[0.0, 1.0, 0.0]), v(&[1.0, 1.0, 2.0])).unwrap();
        assert_eq!(codimension(&flat_box, 3).unwrap().codim, 1);
        let sum = ConvexSet::minkowski_sum(
            ConvexSet::point(v(&[0.0, 0.0, 0.0])),
            ConvexSet::ray(v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0])).unwrap(),
        )
        .unwrap();
        assert_eq!(codimension(&sum, 3).unwrap(), CodimResult { dim_aff: 1, codim: 2 });
        assert!(codimension(&ray, 2).is_err());
    }

    #[test]
    fn linear_subspace_codim_is_d_minus_k() {
        for d in 1..=6 {
            for k in 0..=d {
                let spanning: Vec<Vector> = (0..k)
                    .map(|i| Vector::from_fn(d, |j| if j <= i { 1.0 } else { 0.0 }))
                    .collect();
                let s = ConvexSet::linear_span(d, &spanning).unwrap();
                assert_eq!(codimension(&s, d).unwrap().codim, d - k);
            }
        }
    }
}
