use serde::{Deserialize, Serialize};

use super::iterate;
use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::operators::OperatorExpr;
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementMethod {
    StepDifferenceTail,
    ClosedFormTwoBalls,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementEstimate {
    pub v: Vector,
    pub method: DisplacementMethod,
    /// Max over the tail of `‖(T^n x - T^{n+1} x) - v‖`.
    pub residual: f64,
    /// Computed without an averagedness certificate.
    pub heuristic: bool,
}

/// Estimate the displacement vector as the mean of `T^n x - T^{n+1} x`
/// over the last `tail` steps of an `n_steps` orbit.
///
/// Step differences converge to the displacement only for averaged maps, so
/// uncertified operators are refused unless `allow_heuristic` is set.
pub fn estimate_displacement(
    op: &OperatorExpr,
    x0: &Vector,
    n_steps: usize,
    tail: usize,
    allow_heuristic: bool,
) -> Result<DisplacementEstimate> {
    let cert = op.certify();
    if !cert.is_averaged() && !allow_heuristic {
        return Err(Error::CertificateRequired(format!("{cert:?}")));
    }
    if tail == 0 || tail >= n_steps {
        return Err(Error::InvalidArgument(format!(
            "tail must lie in 1..{n_steps}, got {tail}"
        )));
    }
    let orbit = iterate(op, x0, n_steps)?;
    let n = orbit.len() - 1;
    if n < tail {
        return Err(Error::InvalidArgument(format!(
            "orbit stopped after {n} steps, shorter than the tail {tail}"
        )));
    }
    let pts = &orbit.points;
    // Telescoped mean of the tail step differences.
    let v = (&pts[n - tail] - &pts[n]).scale(1.0 / tail as f64);
    let residual = (n - tail..n)
        .map(|k| (&pts[k] - &pts[k + 1]).dist(&v))
        .fold(0.0, f64::max);
    Ok(DisplacementEstimate {
        v,
        method: DisplacementMethod::StepDifferenceTail,
        residual,
        heuristic: !cert.is_averaged(),
    })
}

/// Minimal displacement for the Douglas–Rachford operator of two balls: the
/// shortest `v` with `A ∩ (B + v) ≠ ∅`, which points from `c_B` toward `c_A`
/// with length `max(0, ‖c_A - c_B‖ - r_A - r_B)`.
pub fn two_ball_displacement(a: &ConvexSet, b: &ConvexSet) -> Result<Vector> {
    let (ca, ra) = ball_parts(a)?;
    let (cb, rb) = ball_parts(b)?;
    ca.expect_dim(cb.dim())?;
    let diff = &ca - &cb;
    let d = diff.norm();
    if d <= ra + rb {
        return Ok(Vector::zeros(ca.dim()));
    }
    Ok(diff.scale((d - ra - rb) / d))
}

fn ball_parts(s: &ConvexSet) -> Result<(Vector, f64)> {
    match s {
        ConvexSet::Ball { center, radius } => Ok((center.clone(), *radius)),
        ConvexSet::Point { at } => Ok((at.clone(), 0.0)),
        other => Err(Error::InvalidArgument(format!(
            "two-ball displacement needs balls, got {}",
            other.kind_name()
        ))),
    }
}
