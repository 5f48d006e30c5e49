use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LimitStatus {
    /// Tail diameter within tolerance; `limit` is the tail mean.
    Converged { limit: Vector, residual: f64 },
    /// Norms nondecreasing across the tail with mean growth ≥ tol per step.
    Diverging { norm_growth_rate: f64 },
    /// The tail keeps returning to at least two separated clusters.
    Oscillating { centers: Vec<Vector>, gap: f64 },
    Inconclusive,
}

impl LimitStatus {
    pub fn name(&self) -> &'static str {
        match self {
            LimitStatus::Converged { .. } => "converged",
            LimitStatus::Diverging { .. } => "diverging",
            LimitStatus::Oscillating { .. } => "oscillating",
            LimitStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    #[serde(flatten)]
    pub status: LimitStatus,
    pub tail_window: usize,
    pub tolerance: f64,
}

/// Classify the last `tail_window` points of a trajectory.
///
/// Step size alone is never taken as evidence of convergence: the tail must
/// have diameter within `tol`. A window longer than the trajectory is clamped.
pub fn detect_limit(traj: &Trajectory, tail_window: usize, tol: f64) -> LimitEstimate {
    let w = tail_window.min(traj.len());
    let status = if w < 2 {
        LimitStatus::Inconclusive
    } else {
        classify(&traj.points[traj.len() - w..], tol)
    };
    LimitEstimate {
        status,
        tail_window: w,
        tolerance: tol,
    }
}

fn classify(tail: &[Vector], tol: f64) -> LimitStatus {
    let diam = diameter_up_to(tail, tol);
    if diam <= tol {
        return LimitStatus::Converged {
            limit: mean(tail),
            residual: diam,
        };
    }

    let norms: Vec<f64> = tail.iter().map(Vector::norm).collect();
    let rate = (norms[norms.len() - 1] - norms[0]) / (norms.len() - 1) as f64;
    if rate >= tol && norms.windows(2).all(|p| p[1] >= p[0]) {
        return LimitStatus::Diverging {
            norm_growth_rate: rate,
        };
    }

    oscillation(tail, 10.0 * tol).unwrap_or(LimitStatus::Inconclusive)
}

/// Max pairwise distance, stopping early once it exceeds `cap`.
fn diameter_up_to(points: &[Vector], cap: f64) -> f64 {
    let mut d = 0.0_f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(q));
        }
        if d > cap {
            return d;
        }
    }
    d
}

fn mean(points: &[Vector]) -> Vector {
    let n = points.len() as f64;
    let sum = points[1..].iter().fold(points[0].clone(), |acc, p| &acc + p);
    sum.scale(1.0 / n)
}

/// Single-linkage components at `link` distance; oscillation means at least
/// two components with repeated visits and a return to an earlier component.
fn oscillation(tail: &[Vector], link: f64) -> Option<LimitStatus> {
    let labels = single_linkage(tail, link);
    let n_labels = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; n_labels];
    for &l in &labels {
        counts[l] += 1;
    }
    if counts.iter().filter(|&&c| c >= 2).count() < 2 {
        return None;
    }
    let mut seen = vec![false; n_labels];
    let mut revisit = false;
    for (i, &l) in labels.iter().enumerate() {
        if i > 0 && labels[i - 1] != l && seen[l] {
            revisit = true;
            break;
        }
        seen[l] = true;
    }
    if !revisit {
        return None;
    }
    let centers: Vec<Vector> = (0..n_labels)
        .filter(|&l| counts[l] >= 2)
        .map(|l| {
            let members: Vec<Vector> = tail
                .iter()
                .zip(&labels)
                .filter(|(_, &m)| m == l)
                .map(|(p, _)| p.clone())
                .collect();
            mean(&members)
        })
        .collect();
    let mut gap = f64::INFINITY;
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            gap = gap.min(a.dist(b));
        }
    }
    Some(LimitStatus::Oscillating { centers, gap })
}

/// Component labels numbered in order of first appearance.
pub(crate) fn single_linkage(points: &[Vector], link: f64) -> Vec<usize> {
    let n = points.len();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dist(&points[j]) <= link {
                uf.union(i, j);
            }
        }
    }
    let mut relabel = std::collections::HashMap::new();
    (0..n)
        .map(|i| {
            let root = uf.find(i);
            let next = relabel.len();
            *relabel.entry(root).or_insert(next)
        })
        .collect()
}
