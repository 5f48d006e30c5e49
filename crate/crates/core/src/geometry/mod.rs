//! Closed convex sets with closed-form projectors.
//!
//! Sets are stored by their defining parameters. Every projector below is an
//! exact formula; combinations without one return [`Error::UnsupportedSet`].

mod codim;
mod cone;
mod sample;

pub use codim::{codimension, orthonormalize, CodimResult};
pub use cone::{dual_cone_contains, dual_cone_violation};
pub use sample::sample_witnesses;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Absolute membership tolerance used when no other value is given.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Tolerance for orthonormality of stored bases.
pub const BASIS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSet {
    Point {
        at: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    /// `{x : <normal, x> <= offset}`
    Halfspace {
        normal: Vector,
        offset: f64,
    },
    /// `{x : <normal, x> = offset}`
    Hyperplane {
        normal: Vector,
        offset: f64,
    },
    /// `base + span(basis)`, basis orthonormal.
    AffineSubspace {
        base: Vector,
        basis: Vec<Vector>,
    },
    /// `span(basis)` in ℝ^dim, basis orthonormal (possibly empty).
    LinearSubspace {
        dim: usize,
        basis: Vec<Vector>,
    },
    Box {
        lower: Vector,
        upper: Vector,
    },
    /// `{base + t * direction : t >= 0}`, direction of unit norm.
    Ray {
        base: Vector,
        direction: Vector,
    },
    /// `{x : signs[i] * x[i] >= 0}`, signs in {-1, +1}.
    Orthant {
        signs: Vec<i8>,
    },
    /// `E + K` with `K` a closed convex cone.
    MinkowskiSum {
        e: Box<ConvexSet>,
        k: Box<ConvexSet>,
    },
}

impl ConvexSet {
    pub fn point(at: Vector) -> Self {
        ConvexSet::Point { at }
    }

    /// A ball of radius 0 collapses to its center.
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be finite and nonnegative, got {radius}"
            )));
        }
        if radius == 0.0 {
            Ok(ConvexSet::Point { at: center })
        } else {
            Ok(ConvexSet::Ball { center, radius })
        }
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(ConvexSet::Hyperplane { normal, offset })
    }

    /// `base + span(spanning)`; the spanning list is orthonormalized.
    pub fn affine_span(base: Vector, spanning: &[Vector]) -> Result<Self> {
        check_dims(base.dim(), spanning)?;
        Ok(ConvexSet::AffineSubspace {
            basis: orthonormalize(spanning, 1e-10),
            base,
        })
    }

    /// `span(spanning)` in ℝ^dim; the spanning list is orthonormalized.
    pub fn linear_span(dim: usize, spanning: &[Vector]) -> Result<Self> {
        check_dims(dim, spanning)?;
        Ok(ConvexSet::LinearSubspace {
            dim,
            basis: orthonormalize(spanning, 1e-10),
        })
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        lower.expect_dim(upper.dim())?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidArgument(format!(
                "box bound {i}: lower {} exceeds upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    /// The direction is rescaled to unit length.
    pub fn ray(base: Vector, direction: Vector) -> Result<Self> {
        base.expect_dim(direction.dim())?;
        let direction = direction
            .normalized()
            .ok_or_else(|| Error::InvalidArgument("ray direction must be nonzero".into()))?;
        Ok(ConvexSet::Ray { base, direction })
    }

    pub fn orthant(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.len() > crate::vector::MAX_DIM {
            return Err(Error::InvalidArgument("orthant dimension out of range".into()));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument("orthant signs must be +1 or -1".into()));
        }
        Ok(ConvexSet::Orthant { signs })
    }

    pub fn minkowski_sum(e: ConvexSet, k: ConvexSet) -> Result<Self> {
        if !k.is_cone() {
            return Err(Error::InvalidArgument(
                "second summand of a Minkowski sum must be a cone (ray from 0, orthant or subspace)"
                    .into(),
            ));
        }
        if e.dim() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                found: k.dim(),
            });
        }
        Ok(ConvexSet::MinkowskiSum {
            e: Box::new(e),
            k: Box::new(k),
        })
    }

    /// Re-run the constructor checks on a deserialized value, returning the
    /// normalized set.
    pub fn validated(&self) -> Result<Self> {
        use ConvexSet::*;
        match self {
            Point { at } => Ok(Point { at: at.clone() }),
            Ball { center, radius } => ConvexSet::ball(center.clone(), *radius),
            Halfspace { normal, offset } => ConvexSet::halfspace(normal.clone(), *offset),
            Hyperplane { normal, offset } => ConvexSet::hyperplane(normal.clone(), *offset),
            AffineSubspace { base, basis } => {
                check_dims(base.dim(), basis)?;
                check_orthonormal(basis)?;
                Ok(self.clone())
            }
            LinearSubspace { dim, basis } => {
                if *dim == 0 || *dim > crate::vector::MAX_DIM {
                    return Err(Error::InvalidArgument(format!(
                        "subspace ambient dimension {dim} out of range"
                    )));
                }
                check_dims(*dim, basis)?;
                check_orthonormal(basis)?;
                Ok(self.clone())
            }
            Box { lower, upper } => ConvexSet::boxed(lower.clone(), upper.clone()),
            Ray { base, direction } => {
                if (direction.norm() - 1.0).abs() > BASIS_TOL {
                    return Err(Error::InvalidArgument("ray direction must have unit norm".into()));
                }
                ConvexSet::ray(base.clone(), direction.clone())
            }
            Orthant { signs } => ConvexSet::orthant(signs.clone()),
            MinkowskiSum { e, k } => ConvexSet::minkowski_sum(e.validated()?, k.validated()?),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        use ConvexSet::*;
        match self {
            Point { at } => at.dim(),
            Ball { center, .. } => center.dim(),
            Halfspace { normal, .. } | Hyperplane { normal, .. } => normal.dim(),
            AffineSubspace { base, .. } => base.dim(),
            LinearSubspace { dim, .. } => *dim,
            Box { lower, .. } => lower.dim(),
            Ray { base, .. } => base.dim(),
            Orthant { signs } => signs.len(),
            MinkowskiSum { e, .. } => e.dim(),
        }
    }

    /// Ray from the origin, orthant, or linear subspace.
    pub fn is_cone(&self) -> bool {
        match self {
            ConvexSet::Ray { base, .. } => base.max_abs() == 0.0,
            ConvexSet::Orthant { .. } | ConvexSet::LinearSubspace { .. } => true,
            _ => false,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(
            self,
            ConvexSet::Point { .. }
                | ConvexSet::Hyperplane { .. }
                | ConvexSet::AffineSubspace { .. }
                | ConvexSet::LinearSubspace { .. }
        )
    }

    /// Canonical member of the set: the center, base point, or the point
    /// nearest the origin.
    pub fn anchor(&self) -> Result<Vector> {
        use ConvexSet::*;
        match self {
            Point { at } => Ok(at.clone()),
            Ball { center, .. } => Ok(center.clone()),
            AffineSubspace { base, .. } | Ray { base, .. } => Ok(base.clone()),
            Halfspace { .. } | Hyperplane { .. } | LinearSubspace { .. } | Box { .. } | Orthant { .. } => {
                self.project(&Vector::zeros(self.dim()))
            }
            MinkowskiSum { e, .. } => e.anchor(),
        }
    }

    /// Metric projection onto the set.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.expect_dim(self.dim())?;
        use ConvexSet::*;
        let p = match self {
            Point { at } => at.clone(),
            Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.axpy(radius / n, &d)
                }
            }
            Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.norm_sq(), normal)
                }
            }
            Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - offset;
                x.axpy(-excess / normal.norm_sq(), normal)
            }
            AffineSubspace { base, basis } => {
                let rel = x - base;
                basis.iter().fold(base.clone(), |acc, e| acc.axpy(rel.dot(e), e))
            }
            LinearSubspace { dim, basis } => basis
                .iter()
                .fold(Vector::zeros(*dim), |acc, e| acc.axpy(x.dot(e), e)),
            Box { lower, upper } => Vector::from_fn(x.dim(), |i| x[i].clamp(lower[i], upper[i])),
            Ray { base, direction } => {
                let t = (x - base).dot(direction).max(0.0);
                base.axpy(t, direction)
            }
            Orthant { signs } => Vector::from_fn(x.dim(), |i| {
                if signs[i] > 0 {
                    x[i].max(0.0)
                } else {
                    x[i].min(0.0)
                }
            }),
            MinkowskiSum { e, k } => project_sum(e, k, x)?,
        };
        Ok(p)
    }

    /// Reflection `2 P_C x - x`.
    pub fn reflect(&self, x: &Vector) -> Result<Vector> {
        let p = self.project(x)?;
        Ok(p.zip_map(x, |p, x| 2.0 * p - x))
    }

    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok(self.project(x)?.dist(x))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }
}

/// Projection onto `E + K` for the supported cases.
///
/// * `E = {p}`: `p + P_K(x - p)`.
/// * `E = B(c, r)`: `E + K` is the `r`-enlargement of `D = c + K`, so points
///   within `r` of `D` are fixed and the rest move to `P_D x + r u` where `u`
///   is the unit vector from `P_D x` to `x`.
fn project_sum(e: &ConvexSet, k: &ConvexSet, x: &Vector) -> Result<Vector> {
    if !k.is_cone() {
        return Err(Error::UnsupportedSet(
            "Minkowski sum requires a cone as second summand".into(),
        ));
    }
    match e {
        ConvexSet::Point { at } => Ok(at + &k.project(&(x - at))?),
        ConvexSet::Ball { center, radius } => {
            let q = center + &k.project(&(x - center))?;
            let gap = x - &q;
            let d = gap.norm();
            if d <= *radius {
                Ok(x.clone())
            } else {
                Ok(q.axpy(radius / d, &gap))
            }
        }
        other => Err(Error::UnsupportedSet(format!(
            "no closed-form projector onto {} + cone",
            other.kind_name()
        ))),
    }
}

impl ConvexSet {
    pub fn kind_name(&self) -> &'static str {
        use ConvexSet::*;
        match self {
            Point { .. } => "point",
            Ball { .. } => "ball",
            Halfspace { .. } => "halfspace",
            Hyperplane { .. } => "hyperplane",
            AffineSubspace { .. } => "affine_subspace",
            LinearSubspace { .. } => "linear_subspace",
            Box { .. } => "box",
            Ray { .. } => "ray",
            Orthant { .. } => "orthant",
            MinkowskiSum { .. } => "minkowski_sum",
        }
    }
}

fn check_normal(normal: &Vector, offset: f64) -> Result<()> {
    if normal.norm() == 0.0 {
        return Err(Error::InvalidArgument("normal vector must be nonzero".into()));
    }
    if !offset.is_finite() {
        return Err(Error::InvalidArgument("offset must be finite".into()));
    }
    Ok(())
}

fn check_dims(dim: usize, vectors: &[Vector]) -> Result<()> {
    for v in vectors {
        v.expect_dim(dim)?;
    }
    Ok(())
}

fn check_orthonormal(basis: &[Vector]) -> Result<()> {
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (a.dot(b) - target).abs() > BASIS_TOL {
                return Err(Error::InvalidArgument(format!(
                    "basis vectors {i} and {j} are not orthonormal"
                )));
            }
        }
    }
    Ok(())
}
