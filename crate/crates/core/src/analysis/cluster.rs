use serde::{Deserialize, Serialize};

use super::{DiagnosticsReport, Verdict, WitnessSpec, NECESSARY_ONLY};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::{sample_witnesses, ConvexSet};
use crate::vector::Vector;

/// Finite approximation of the cluster set of a trajectory's tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub representatives: Vec<Vector>,
    pub radius: f64,
    pub component_labels: Vec<usize>,
}

impl ClusterSet {
    pub fn components(&self) -> usize {
        self.component_labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

fn tail(traj: &Trajectory, tail_fraction: f64) -> &[Vector] {
    let n = traj.len();
    let keep = ((n as f64 * tail_fraction).ceil() as usize).clamp(1, n);
    &traj.points[n - keep..]
}

/// `0.05 * (extent + tol)`, floored at `1e-6`. The extent is the diagonal of
/// the tail's bounding box, which bounds the diameter within a factor `√d`.
pub fn default_cluster_radius(traj: &Trajectory, tail_fraction: f64, tol: f64) -> f64 {
    let pts = tail(traj, tail_fraction);
    let d = traj.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in pts {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let extent = lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
    (0.05 * (extent + tol)).max(1e-6)
}

/// Greedy covering of the last `tail_fraction` of the trajectory by balls of
/// `radius`, in trajectory order; components link representatives at
/// distance `<= 2 * radius`.
pub fn estimate_cluster_set(traj: &Trajectory, tail_fraction: f64, radius: f64) -> Result<ClusterSet> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("tail fraction {tail_fraction} not in (0, 1]")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("cluster radius {radius} must be positive")));
    }
    let mut reps: Vec<Vector> = Vec::new();
    let mut last = 0;
    for p in tail(traj, tail_fraction) {
        // Consecutive points are usually close to the most recent hit.
        if reps.get(last).is_some_and(|r| r.dist(p) <= radius) {
            continue;
        }
        match reps.iter().position(|r| r.dist(p) <= radius) {
            Some(i) => last = i,
            None => {
                reps.push(p.clone());
                last = reps.len() - 1;
            }
        }
    }
    let component_labels = crate::dynamics::single_linkage(&reps, 2.0 * radius);
    Ok(ClusterSet {
        representatives: reps,
        radius,
        component_labels,
    })
}

/// Passes iff the cluster set forms a single component.
pub fn check_connectivity(cluster: &ClusterSet) -> Result<DiagnosticsReport> {
    if cluster.is_empty() {
        return Err(Error::InvalidArgument("empty cluster set".into()));
    }
    let k = cluster.components();
    let report = DiagnosticsReport::new("connectivity", Verdict::Pass)
        .param("radius", cluster.radius)
        .param("link", 2.0 * cluster.radius)
        .meta("representatives", cluster.representatives.len())
        .meta("components", k);
    if k == 1 {
        return Ok(report);
    }
    // Smallest distance between each pair of components.
    let mut gaps = vec![vec![f64::INFINITY; k]; k];
    let mut best: Option<(f64, usize)> = None;
    for (i, a) in cluster.representatives.iter().enumerate() {
        for (j, b) in cluster.representatives.iter().enumerate().skip(i + 1) {
            let (ci, cj) = (cluster.component_labels[i], cluster.component_labels[j]);
            if ci == cj {
                continue;
            }
            let d = a.dist(b);
            gaps[ci][cj] = gaps[ci][cj].min(d);
            gaps[cj][ci] = gaps[ci][cj];
            if best.is_none_or(|(m, _)| d < m) {
                best = Some((d, i));
            }
        }
    }
    let (gap, at) = best.expect("at least two components");
    let pairwise: Vec<(usize, usize, f64)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, gaps[i][j]))
        .collect();
    let mut report = report.meta("pairwise_gaps", pairwise).meta("gap", gap);
    report.verdict = Verdict::fail(None, Some(cluster.representatives[at].clone()), "component gap", gap);
    Ok(report)
}

/// `|<w_i - w_j, c - c'>| <= tol * (1 + ‖w_i - w_j‖ ‖c - c'‖)` for every pair
/// of representatives and every pair of sampled witnesses of `set`.
pub fn check_cluster_orthogonality(
    cluster: &ClusterSet,
    set: &ConvexSet,
    witnesses: &WitnessSpec,
    tol: f64,
) -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::new("cluster_orthogonality", Verdict::Pass)
        .param("set", set.kind_name())
        .param("witnesses", witnesses.count)
        .param("tol", tol)
        .with_seed(witnesses.seed)
        .meta("representatives", cluster.representatives.len())
        .meta("semantics", NECESSARY_ONLY);
    if cluster.representatives.len() < 2 {
        report.set_meta("vacuous", true);
        return Ok(report);
    }
    let cs = sample_witnesses(set, witnesses.count, witnesses.seed, witnesses.radius)?;
    let mut diffs = Vec::new();
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            let d = a - b;
            if d.norm() > 0.0 {
                diffs.push(d);
            }
        }
    }
    let reps = &cluster.representatives;
    let mut worst: Option<(f64, usize)> = None;
    let mut max_ratio = 0.0_f64;
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            let dw = a - b;
            let nw = dw.norm();
            for dc in &diffs {
                let inner = dw.dot(dc).abs();
                let bound = 1.0 + nw * dc.norm();
                max_ratio = max_ratio.max(inner / bound);
                if inner > tol * bound && worst.is_none_or(|(m, _)| inner > m) {
                    worst = Some((inner, i));
                }
            }
        }
    }
    report.set_meta("max_relative_inner_product", max_ratio);
    if let Some((inner, i)) = worst {
        report.verdict = Verdict::fail(None, Some(reps[i].clone()), "inner product with C - C", inner);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Trajectory;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    fn alternating(n: usize) -> Trajectory {
        Trajectory::explicit("alt", (0..n).map(|k| v(&[(-1.0_f64).powi(k as i32), 0.0])).collect()).unwrap()
    }

    #[test]
    fn alternating_pair_has_two_components() {
        let t = alternating(100);
        let s = estimate_cluster_set(&t, 0.5, 0.1).unwrap();
        assert_eq!(s.representatives.len(), 2);
        assert_eq!(s.components(), 2);
        let r = check_connectivity(&s).unwrap();
        match r.verdict {
            Verdict::Fail { witness } => assert_eq!(witness.magnitude, 2.0),
            other => panic!("{other:?}"),
        }
        let axis = ConvexSet::hyperplane(v(&[1.0, 0.0]), 0.0).unwrap();
        let r = check_cluster_orthogonality(&s, &axis, &WitnessSpec::default(), 1e-12).unwrap();
        assert!(r.verdict.is_pass());
    }

    #[test]
    fn covering_invariants_hold() {
        let pts: Vec<Vector> = (0..500).map(|k| v(&[(k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.11).cos()])).collect();
        let t = Trajectory::explicit("wiggle", pts).unwrap();
        let s = estimate_cluster_set(&t, 0.5, 0.2).unwrap();
        for p in &t.points[250..] {
            assert!(s.representatives.iter().any(|r| r.dist(p) <= 0.2));
        }
        for (i, a) in s.representatives.iter().enumerate() {
            for b in &s.representatives[i + 1..] {
                assert!(a.dist(b) > 0.2);
            }
        }
    }

    #[test]
    fn constant_sequence_has_one_representative() {
        let t = Trajectory::explicit("c", vec![v(&[2.0, 1.0]); 10]).unwrap();
        let r = default_cluster_radius(&t, 0.5, 1e-9);
        assert_eq!(r, 1e-6);
        let s = estimate_cluster_set(&t, 0.5, r).unwrap();
        assert_eq!(s.representatives, vec![v(&[2.0, 1.0])]);
        assert!(check_connectivity(&s).unwrap().verdict.is_pass());
        let r = check_cluster_orthogonality(&s, &ConvexSet::point(v(&[0.0, 0.0])), &WitnessSpec::default(), 0.0);
        assert_eq!(r.unwrap().metadata["vacuous"], true);
    }

    #[test]
    fn non_orthogonal_clusters_fail() {
        let s = estimate_cluster_set(&alternating(10), 1.0, 0.1).unwrap();
        let x_axis = ConvexSet::linear_span(2, &[v(&[1.0, 0.0])]).unwrap();
        assert!(check_cluster_orthogonality(&s, &x_axis, &WitnessSpec::default(), 1e-8)
            .unwrap()
            .verdict
            .is_fail());
    }

    #[test]
    fn rejects_bad_arguments() {
        let t = alternating(4);
        assert!(estimate_cluster_set(&t, 0.0, 0.1).is_err());
        assert!(estimate_cluster_set(&t, 1.5, 0.1).is_err());
        assert!(estimate_cluster_set(&t, 0.5, 0.0).is_err());
    }
}
