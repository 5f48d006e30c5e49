use super::{DiagnosticsReport, Verdict, VerdictKind, WitnessSpec, NECESSARY_ONLY};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::{dual_cone_violation, sample_witnesses, ConvexSet};
use crate::vector::Vector;

/// Fejér monotonicity of `traj` with respect to `set`, tested on sampled
/// witnesses: `‖x_{n+1} - c‖ <= ‖x_n - c‖ + tol` for every witness `c` and
/// every `n`. `per_step` holds `‖x_n - c‖² - ‖x_{n+1} - c‖²` for the anchor.
pub fn check_fejer(traj: &Trajectory, set: &ConvexSet, witnesses: &WitnessSpec, tol: f64) -> Result<DiagnosticsReport> {
    let pts = sample_witnesses(set, witnesses.count, witnesses.seed, witnesses.radius)?;
    let report = check_fejer_against(traj, &pts, tol)?
        .param("set", set.kind_name())
        .param("witnesses", witnesses.count)
        .param("witness_radius", witnesses.radius)
        .with_seed(witnesses.seed);
    Ok(report)
}

/// [`check_fejer`] on an explicit witness list; the first witness provides
/// the per-step data.
pub fn check_fejer_against(traj: &Trajectory, witnesses: &[Vector], tol: f64) -> Result<DiagnosticsReport> {
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("Fejér check needs at least two points".into()));
    }
    if witnesses.is_empty() {
        return Err(Error::InvalidArgument("Fejér check needs at least one witness".into()));
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    let mut per_step = Vec::new();
    for (k, c) in witnesses.iter().enumerate() {
        c.expect_dim(traj.dim())?;
        let mut prev = traj.points[0].dist(c);
        let mut prev_sq = (&traj.points[0] - c).norm_sq();
        for (n, x) in traj.points.iter().enumerate().skip(1) {
            let d = x.dist(c);
            if k == 0 {
                let d_sq = (x - c).norm_sq();
                per_step.push(prev_sq - d_sq);
                prev_sq = d_sq;
            }
            let excess = d - prev;
            if excess > tol && worst.is_none_or(|w| excess > w.2) {
                worst = Some((n - 1, k, excess));
            }
            prev = d;
        }
    }
    let verdict = match worst {
        None => Verdict::Pass,
        Some((n, k, excess)) => Verdict::fail(Some(n), Some(witnesses[k].clone()), "distance increase", excess),
    };
    Ok(DiagnosticsReport::new("fejer", verdict)
        .param("tol", tol)
        .with_per_step(per_step)
        .meta("semantics", NECESSARY_ONLY))
}

/// `per_step` = `‖x_n - x_{n+1}‖`; passes iff the largest step in the last
/// 10% of the trajectory is within `tol`.
pub fn check_asymptotic_regularity(traj: &Trajectory, tol: f64) -> Result<DiagnosticsReport> {
    if traj.len() < 2 {
        return Err(Error::InvalidArgument(
            "asymptotic regularity check needs at least two points".into(),
        ));
    }
    let steps: Vec<f64> = traj.steps().map(|s| s.norm()).collect();
    let tail_len = (steps.len() / 10).max(1);
    let start = steps.len() - tail_len;
    let (arg, max) = steps[start..]
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(a, m), (i, &s)| if s > m { (i, s) } else { (a, m) });
    let verdict = if max <= tol {
        Verdict::Pass
    } else {
        Verdict::fail(Some(start + arg), None, "tail step norm", max)
    };
    Ok(DiagnosticsReport::new("asymptotic_regularity", verdict)
        .param("tol", tol)
        .param("tail_steps", tail_len)
        .meta("max_tail_step", max)
        .with_per_step(steps))
}

/// Decoupled Fejér test against `E + K`: (a) Fejér with respect to `E` and
/// (b) every step in the dual cone `K^⊕`. When the sum has a closed-form
/// projector the direct Fejér check against `E + K` runs too and the
/// agreement of the two routes is recorded.
pub fn check_sum_decoupling(
    traj: &Trajectory,
    e: &ConvexSet,
    k: &ConvexSet,
    witnesses: &WitnessSpec,
    tol: f64,
) -> Result<DiagnosticsReport> {
    if !k.is_cone() {
        return Err(Error::UnsupportedSet(format!("{} is not a supported cone", k.kind_name())));
    }
    let fejer_e = check_fejer(traj, e, witnesses, tol)?;

    let mut cone_fail = None;
    for (n, step) in traj.steps().enumerate() {
        let viol = dual_cone_violation(k, &step)?;
        if viol > tol && cone_fail.as_ref().is_none_or(|(_, m)| viol > *m) {
            cone_fail = Some((n, viol));
        }
    }
    let cone_kind = if cone_fail.is_some() { VerdictKind::Fail } else { VerdictKind::Pass };

    let verdict = match (&fejer_e.verdict, cone_fail) {
        (Verdict::Fail { witness }, _) => Verdict::Fail {
            witness: super::Witness {
                quantity: format!("(a) {}", witness.quantity),
                ..witness.clone()
            },
        },
        (_, Some((n, viol))) => Verdict::fail(Some(n), None, "(b) step outside dual cone", viol),
        _ => Verdict::Pass,
    };

    let direct = ConvexSet::minkowski_sum(e.clone(), k.clone())
        .and_then(|sum| check_fejer(traj, &sum, witnesses, tol));
    let mut report = DiagnosticsReport::new("sum_decoupling", verdict)
        .param("e", e.kind_name())
        .param("k", k.kind_name())
        .param("tol", tol)
        .param("witnesses", witnesses.count)
        .with_seed(witnesses.seed)
        .meta("fejer_e", fejer_e.verdict.kind())
        .meta("dual_cone", cone_kind)
        .meta("semantics", NECESSARY_ONLY);
    match direct {
        Ok(d) => {
            let decoupled = fejer_e.verdict.is_pass() && cone_kind == VerdictKind::Pass;
            report.set_meta("direct", d.verdict.kind());
            report.set_meta("equivalence_agrees", decoupled == d.verdict.is_pass());
        }
        Err(Error::UnsupportedSet(msg)) => report.set_meta("direct", format!("unsupported: {msg}")),
        Err(other) => return Err(other),
    }
    Ok(report)
}
