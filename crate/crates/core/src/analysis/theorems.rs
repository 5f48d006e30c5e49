use super::{
    check_asymptotic_regularity, check_fejer, default_cluster_radius, estimate_cluster_set, CheckParams,
    DiagnosticsReport, Verdict, NECESSARY_ONLY,
};
use crate::dynamics::{detect_limit, iterate, shadow, LimitStatus, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{codimension, sample_witnesses, ConvexSet, MEMBERSHIP_TOL};
use crate::operators::OperatorExpr;
use crate::vector::Vector;

fn converged(traj: &Trajectory, params: &CheckParams) -> Option<Vector> {
    match detect_limit(traj, params.tail_window, params.tol).status {
        LimitStatus::Converged { limit, .. } => Some(limit),
        _ => None,
    }
}

/// Compares the shadows of `traj` on `c` and on a superset `a`. When every
/// cluster point of the `a`-shadow lies in `c`, both shadows must converge
/// to the same point.
pub fn check_shadow_superset(
    traj: &Trajectory,
    c: &ConvexSet,
    a: &ConvexSet,
    params: &CheckParams,
) -> Result<DiagnosticsReport> {
    let w = &params.witnesses;
    for p in sample_witnesses(c, w.count, w.seed, w.radius)? {
        if !a.contains(&p, MEMBERSHIP_TOL)? {
            return Err(Error::InvalidArgument(format!(
                "{} is not contained in {}",
                c.kind_name(),
                a.kind_name()
            )));
        }
    }
    let tol = params.tol;
    let on_c = shadow(traj, c)?;
    let on_a = shadow(traj, a)?;
    let report = DiagnosticsReport::new("shadow_superset", Verdict::Pass)
        .param("c", c.kind_name())
        .param("a", a.kind_name())
        .param("tol", tol)
        .with_seed(w.seed);

    let pointwise = on_c
        .points
        .iter()
        .zip(&on_a.points)
        .map(|(p, q)| p.dist(q))
        .fold(0.0, f64::max);
    let mut report = report.meta("max_pointwise_gap", pointwise);
    if pointwise <= tol {
        return Ok(report);
    }

    let radius = params
        .cluster_radius
        .unwrap_or_else(|| default_cluster_radius(&on_a, params.tail_fraction, tol));
    let cluster = estimate_cluster_set(&on_a, params.tail_fraction, radius)?;
    let mut outside = 0.0_f64;
    for r in &cluster.representatives {
        outside = outside.max(c.distance(r)?);
    }
    report.set_meta("cluster_representatives", cluster.representatives.len());
    report.set_meta("max_cluster_distance_to_c", outside);
    if outside > tol {
        report.verdict = Verdict::inconclusive("cluster points of the superset shadow are not in C");
        return Ok(report);
    }
    let (Some(la), Some(lc)) = (converged(&on_a, params), converged(&on_c, params)) else {
        report.verdict = Verdict::inconclusive("shadow limits not detected within the tail window");
        return Ok(report);
    };
    let gap = la.dist(&lc);
    report.set_meta("limit_gap", gap);
    if gap > tol {
        report.verdict = Verdict::fail(None, Some(la), "distance between shadow limits", gap);
    }
    Ok(report)
}

/// Codimension-one convergence test on a given trajectory: if `set` has
/// codimension one and the trajectory is Fejér monotone with respect to it
/// and asymptotically regular, it must converge. A non-converging trajectory
/// that meets the hypotheses is reported as `Fail`.
pub fn check_codim1(traj: &Trajectory, set: &ConvexSet, params: &CheckParams) -> Result<DiagnosticsReport> {
    let codim = codimension(set, traj.dim())?;
    let fejer = check_fejer(traj, set, &params.witnesses, params.tol)?;
    let regular = check_asymptotic_regularity(traj, params.tol)?;
    let mut report = DiagnosticsReport::new("codim1", Verdict::Pass)
        .param("set", set.kind_name())
        .param("tol", params.tol)
        .param("tail_window", params.tail_window)
        .with_seed(params.witnesses.seed)
        .meta("codim", codim.codim)
        .meta("fejer", fejer.verdict.kind())
        .meta("asymptotic_regularity", regular.verdict.kind())
        .meta("semantics", NECESSARY_ONLY);

    let mut unmet = Vec::new();
    if codim.codim != 1 {
        unmet.push(format!("codimension is {}", codim.codim));
    }
    if !fejer.verdict.is_pass() {
        unmet.push("not Fejér monotone".to_string());
    }
    if !regular.verdict.is_pass() {
        unmet.push("not asymptotically regular".to_string());
    }
    if !unmet.is_empty() {
        report.verdict = Verdict::inconclusive(format!("hypotheses unmet: {}", unmet.join(", ")));
        return Ok(report);
    }
    let limit = detect_limit(traj, params.tail_window, params.tol);
    report.set_meta("limit", limit.status.name());
    match limit.status {
        LimitStatus::Converged { limit, .. } => report.set_meta("limit_point", limit),
        _ => {
            let last = traj.last().clone();
            report.verdict = Verdict::fail(
                Some(traj.len() - 1),
                Some(last),
                "hypotheses hold but no convergence detected",
                limit.tolerance,
            );
        }
    }
    Ok(report)
}

/// [`check_codim1`] on the raw orbit of `op` from `x0`.
pub fn check_codim1_theorem(
    op: &OperatorExpr,
    set: &ConvexSet,
    x0: &Vector,
    params: &CheckParams,
) -> Result<DiagnosticsReport> {
    let traj = iterate(op, x0, params.n_steps)?;
    Ok(check_codim1(&traj, set, params)?.param("n_steps", params.n_steps))
}
