//! Orbits of nonexpansive maps and their limits.

mod displacement;
mod limit;

pub use displacement::{estimate_displacement, two_ball_displacement, DisplacementEstimate, DisplacementMethod};
pub use limit::{detect_limit, LimitEstimate, LimitStatus};
pub(crate) use limit::single_linkage;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::operators::OperatorExpr;
use crate::vector::Vector;

pub const DEFAULT_STEPS: usize = 100_000;
pub const DEFAULT_TAIL: usize = 1_000;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_NORM_CAP: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryKind {
    /// `x_{n+1} = T x_n`
    Raw,
    /// `T^n x_0 + n v`
    Normalized { v: Vector },
    /// `T^n x_0 - T^n y_0`
    Difference { y0: Vector },
    /// Pointwise projection of `base` onto `set`.
    Shadow { set: ConvexSet, base: Arc<Trajectory> },
    /// A closed-form sequence not generated by an operator.
    Explicit { label: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Vector>,
    pub kind: TrajectoryKind,
    pub operator: Option<Arc<OperatorExpr>>,
    pub start: Vector,
    /// Generation stopped before `n_steps` because the norm cap was hit.
    pub truncated: bool,
}

impl Trajectory {
    pub fn explicit(label: impl Into<String>, points: Vec<Vector>) -> Result<Self> {
        let start = points
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("explicit trajectory needs at least one point".into()))?;
        for p in &points {
            p.expect_dim(start.dim())?;
        }
        Ok(Trajectory {
            points,
            kind: TrajectoryKind::Explicit { label: label.into() },
            operator: None,
            start,
            truncated: false,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn last(&self) -> &Vector {
        self.points.last().unwrap_or(&self.start)
    }

    /// `x_{n+1} - x_n` for every `n`.
    pub fn steps(&self) -> impl Iterator<Item = Vector> + '_ {
        self.points.windows(2).map(|w| &w[1] - &w[0])
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            TrajectoryKind::Raw => "raw",
            TrajectoryKind::Normalized { .. } => "normalized",
            TrajectoryKind::Difference { .. } => "difference",
            TrajectoryKind::Shadow { .. } => "shadow",
            TrajectoryKind::Explicit { .. } => "explicit",
        }
    }
}

/// Raw orbit `x0, T x0, …, T^n x0`, stopping early if the norm cap is hit.
pub fn iterate(op: &OperatorExpr, x0: &Vector, n_steps: usize) -> Result<Trajectory> {
    iterate_capped(op, x0, n_steps, DEFAULT_NORM_CAP)
}

pub fn iterate_capped(op: &OperatorExpr, x0: &Vector, n_steps: usize, norm_cap: f64) -> Result<Trajectory> {
    check_steps(n_steps)?;
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push(x0.clone());
    let mut truncated = false;
    for n in 1..=n_steps {
        let next = op.apply(&points[n - 1])?;
        if !next.is_finite() {
            return Err(Error::NonFiniteValue { step: n });
        }
        let big = next.norm() > norm_cap;
        points.push(next);
        if big {
            truncated = n < n_steps;
            break;
        }
    }
    Ok(Trajectory {
        points,
        kind: TrajectoryKind::Raw,
        operator: Some(Arc::new(op.clone())),
        start: x0.clone(),
        truncated,
    })
}

/// `T^n x0 + n v`, built from the raw orbit.
pub fn normalized_orbit(op: &OperatorExpr, x0: &Vector, v: &Vector, n_steps: usize) -> Result<Trajectory> {
    v.expect_dim(x0.dim())?;
    let raw = iterate(op, x0, n_steps)?;
    let points = raw
        .points
        .iter()
        .enumerate()
        .map(|(n, p)| p.axpy(n as f64, v))
        .collect();
    Ok(Trajectory {
        points,
        kind: TrajectoryKind::Normalized { v: v.clone() },
        operator: raw.operator,
        start: x0.clone(),
        truncated: raw.truncated,
    })
}

/// `T^n x0 - T^n y0`.
///
/// Nonexpansiveness forces the norms to be nonincreasing; an increase beyond
/// rounding (1e-12 scaled by the size of the two iterates) aborts with
/// [`Error::MonotonicityViolation`].
pub fn difference_orbit(op: &OperatorExpr, x0: &Vector, y0: &Vector, n_steps: usize) -> Result<Trajectory> {
    check_steps(n_steps)?;
    y0.expect_dim(x0.dim())?;
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push(&x - &y);
    let mut truncated = false;
    for n in 1..=n_steps {
        x = op.apply(&x)?;
        y = op.apply(&y)?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFiniteValue { step: n });
        }
        let d = &x - &y;
        let before = points[n - 1].norm();
        let after = d.norm();
        let slack = 1e-12 * (1.0 + x.norm().max(y.norm()));
        if after > before + slack {
            return Err(Error::MonotonicityViolation { step: n, before, after });
        }
        points.push(d);
        if x.norm().max(y.norm()) > DEFAULT_NORM_CAP {
            truncated = n < n_steps;
            break;
        }
    }
    Ok(Trajectory {
        points,
        kind: TrajectoryKind::Difference { y0: y0.clone() },
        operator: Some(Arc::new(op.clone())),
        start: x0.clone(),
        truncated,
    })
}

/// `(P_C x_n)` for a base trajectory.
pub fn shadow(base: &Trajectory, set: &ConvexSet) -> Result<Trajectory> {
    let points = base
        .points
        .iter()
        .map(|p| set.project(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        start: points.first().cloned().unwrap_or_else(|| base.start.clone()),
        points,
        kind: TrajectoryKind::Shadow {
            set: set.clone(),
            base: Arc::new(base.clone()),
        },
        operator: base.operator.clone(),
        truncated: base.truncated,
    })
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps == 0 {
        Err(Error::InvalidArgument("n_steps must be at least 1".into()))
    } else {
        Ok(())
    }
}
