//! Seeded random instance families and the sweeps that evaluate them.
//!
//! Each family is a pure function of `(seed, count)`; instance `i` draws
//! from its own substream so sweeps can run in parallel and still produce
//! identical output.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{check_codim1_theorem, check_fejer, check_sum_decoupling, CheckParams, Verdict, WitnessSpec};
use crate::dynamics::{
    detect_limit, difference_orbit, estimate_displacement, iterate, normalized_orbit, two_ball_displacement,
    LimitStatus, Trajectory,
};
use crate::error::Result;
use crate::geometry::{codimension, ConvexSet};
use crate::operators::{fixed_set_description, Matrix, OperatorExpr, PiecewiseLinear};
use crate::random::{in_ball, in_cube, substream, unit_sphere, LabRng};
use crate::vector::Vector;

// ---------------------------------------------------------------------------
// Scalar averaged maps

#[derive(Clone, Debug)]
pub struct ScalarInstance {
    pub alpha: f64,
    pub r: PiecewiseLinear,
    pub op: OperatorExpr,
    pub x: f64,
    pub y: f64,
}

fn random_piecewise_linear(rng: &mut LabRng) -> PiecewiseLinear {
    let k = rng.random_range(0..=4);
    let mut knots: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let slopes = (0..=knots.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let value = rng.random_range(-3.0..3.0);
    PiecewiseLinear::new(knots, slopes, value).expect("generated map is valid")
}

/// `T = (1 - α) Id + α R` with `R` piecewise linear and 1-Lipschitz;
/// `α` cycles through `0.1, …, 0.9`.
pub fn scalar_instances(seed: u64, count: usize) -> Vec<ScalarInstance> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let alpha = 0.1 * (1 + i % 9) as f64;
            let r = random_piecewise_linear(&mut rng);
            let op = OperatorExpr::relaxed(alpha, OperatorExpr::ScalarPiecewiseLinear(r.clone()))
                .expect("alpha in (0, 1)");
            ScalarInstance {
                alpha,
                r,
                op,
                x: rng.random_range(-10.0..=10.0),
                y: rng.random_range(-10.0..=10.0),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarOutcome {
    pub index: usize,
    pub alpha: f64,
    pub x: f64,
    pub y: f64,
    pub limit: LimitStatus,
    /// `max_n (|a_{n+1}| - |a_n|)`
    pub max_increase: f64,
    /// `max (|a_{n+1}| - |1 - 2α| |a_n|)` over sign changes of `a_n`.
    pub max_flip_excess: f64,
    pub sign_flips: usize,
}

pub fn scalar_sweep(seed: u64, count: usize, n_steps: usize, tail: usize, tol: f64) -> Result<Vec<ScalarOutcome>> {
    scalar_instances(seed, count)
        .into_par_iter()
        .enumerate()
        .map(|(index, inst)| {
            let t = difference_orbit(&inst.op, &Vector::scalar(inst.x), &Vector::scalar(inst.y), n_steps)?;
            let beta = (1.0 - 2.0 * inst.alpha).abs();
            let a: Vec<f64> = t.points.iter().map(|p| p[0]).collect();
            let mut max_increase = f64::NEG_INFINITY;
            let mut max_flip_excess = f64::NEG_INFINITY;
            let mut sign_flips = 0;
            for w in a.windows(2) {
                max_increase = max_increase.max(w[1].abs() - w[0].abs());
                if w[0] * w[1] < 0.0 {
                    sign_flips += 1;
                    max_flip_excess = max_flip_excess.max(w[1].abs() - beta * w[0].abs());
                }
            }
            Ok(ScalarOutcome {
                index,
                alpha: inst.alpha,
                x: inst.x,
                y: inst.y,
                limit: detect_limit(&t, tail, tol).status,
                max_increase,
                max_flip_excess,
                sign_flips,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Averaged linear maps

#[derive(Clone, Debug)]
pub struct AffineInstance {
    pub alpha: f64,
    /// `(1 - α) I + α Q` with `Q` orthogonal.
    pub l: Matrix,
    pub op: OperatorExpr,
    /// Orthonormal basis of `Fix(L)`, known by construction.
    pub fixed_basis: Vec<Vector>,
    pub x: Vector,
    pub y: Vector,
}

fn random_orthogonal(rng: &mut LabRng, d: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let qr = g.qr();
        let r = qr.r();
        if (0..d).all(|i| r[(i, i)].abs() > 1e-6) {
            return qr.q();
        }
    }
}

/// `Q = U diag(I_k, rotations, ±1) Uᵀ` with rotation angles in `[0.3, π]`,
/// so `Fix(L) = span` of the first `k` columns of `U`.
pub fn affine_instances(seed: u64, count: usize) -> Vec<AffineInstance> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let d = 2 + i % 3;
            let k = rng.random_range(0..d);
            let mut block = DMatrix::<f64>::identity(d, d);
            let mut j = k;
            while j + 1 < d {
                let th: f64 = rng.random_range(0.3..=std::f64::consts::PI);
                let (s, c) = th.sin_cos();
                block[(j, j)] = c;
                block[(j, j + 1)] = -s;
                block[(j + 1, j)] = s;
                block[(j + 1, j + 1)] = c;
                j += 2;
            }
            if j < d {
                block[(j, j)] = -1.0;
            }
            let u = random_orthogonal(&mut rng, d);
            let q = &u * block * u.transpose();
            let alpha = rng.random_range(0.1..=0.9);
            let l = DMatrix::identity(d, d) * (1.0 - alpha) + q * alpha;
            let l = Matrix::from_nalgebra(l).expect("square");
            let fixed_basis = (0..k)
                .map(|c| Vector::from_fn(d, |r| u[(r, c)]))
                .collect();
            AffineInstance {
                alpha,
                op: OperatorExpr::Linear(l.clone()),
                l,
                fixed_basis,
                x: in_cube(&mut rng, d, 10.0),
                y: in_cube(&mut rng, d, 10.0),
            }
        })
        .collect()
}

impl AffineInstance {
    /// `P_{Fix(L)}(x - y)` from the constructed basis.
    pub fn expected_limit(&self) -> Vector {
        let w = &self.x - &self.y;
        self.fixed_basis
            .iter()
            .fold(Vector::zeros(w.dim()), |acc, b| acc.axpy(b.dot(&w), b))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineOutcome {
    pub index: usize,
    pub dim: usize,
    pub fixed_dim: usize,
    pub alpha: f64,
    pub limit: LimitStatus,
    pub expected: Vector,
    /// Distance between the detected limit and the expected one, if converged.
    pub error: Option<f64>,
}

pub fn affine_sweep(seed: u64, count: usize, n_steps: usize, tail: usize, tol: f64) -> Result<Vec<AffineOutcome>> {
    affine_instances(seed, count)
        .into_par_iter()
        .enumerate()
        .map(|(index, inst)| {
            let t = difference_orbit(&inst.op, &inst.x, &inst.y, n_steps)?;
            let limit = detect_limit(&t, tail, tol).status;
            let expected = inst.expected_limit();
            let error = match &limit {
                LimitStatus::Converged { limit, .. } => Some(limit.dist(&expected)),
                _ => None,
            };
            Ok(AffineOutcome {
                index,
                dim: inst.x.dim(),
                fixed_dim: inst.fixed_basis.len(),
                alpha: inst.alpha,
                limit,
                expected,
                error,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Douglas–Rachford on two disjoint balls

#[derive(Clone, Debug)]
pub struct TwoBallInstance {
    pub a: ConvexSet,
    pub b: ConvexSet,
    pub op: OperatorExpr,
    pub x0: Vector,
}

/// Radii in `[0.5, 2]`, centre distance in `[r_A + r_B + 0.5, 10]`.
pub fn two_ball_instances(seed: u64, count: usize, dim: usize) -> Vec<TwoBallInstance> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let ra = rng.random_range(0.5..=2.0);
            let rb = rng.random_range(0.5..=2.0);
            let dist = rng.random_range(ra + rb + 0.5..=10.0);
            let ca = in_cube(&mut rng, dim, 5.0);
            let cb = ca.axpy(dist, &unit_sphere(&mut rng, dim));
            let a = ConvexSet::ball(ca.clone(), ra).expect("positive radius");
            let b = ConvexSet::ball(cb, rb).expect("positive radius");
            let x0 = &ca + &in_cube(&mut rng, dim, 2.0);
            TwoBallInstance {
                op: OperatorExpr::douglas_rachford(a.clone(), b.clone()).expect("same dimension"),
                a,
                b,
                x0,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoBallOutcome {
    pub index: usize,
    pub v_closed_form: Vector,
    pub v_estimated: Vector,
    pub error: f64,
    pub residual: f64,
    pub fejer: Verdict,
}

pub fn two_ball_sweep(
    seed: u64,
    count: usize,
    dim: usize,
    n_steps: usize,
    tail: usize,
    witnesses: &WitnessSpec,
    tol: f64,
) -> Result<Vec<TwoBallOutcome>> {
    two_ball_instances(seed, count, dim)
        .into_par_iter()
        .enumerate()
        .map(|(index, inst)| {
            let v = two_ball_displacement(&inst.a, &inst.b)?;
            let est = estimate_displacement(&inst.op, &inst.x0, n_steps, tail, false)?;
            let fix = fixed_set_description(&inst.op, &v).ok_or_else(|| {
                crate::Error::InvalidArgument("two-ball fixed set not recognised".into())
            })?;
            let normalized = normalized_orbit(&inst.op, &inst.x0, &v, n_steps)?;
            let spec = WitnessSpec {
                seed: witnesses.seed.wrapping_add(index as u64),
                ..*witnesses
            };
            let fejer = check_fejer(&normalized, &fix, &spec, tol)?.verdict;
            Ok(TwoBallOutcome {
                index,
                error: est.v.dist(&v),
                v_closed_form: v,
                v_estimated: est.v,
                residual: est.residual,
                fejer,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Relaxed hyperplane reflections

#[derive(Clone, Debug)]
pub struct Codim1Instance {
    pub set: ConvexSet,
    pub alpha: f64,
    pub op: OperatorExpr,
    pub x0: Vector,
}

pub fn codim1_instances(seed: u64, count: usize) -> Vec<Codim1Instance> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let d = 2 + i % 2;
            let set = ConvexSet::hyperplane(unit_sphere(&mut rng, d), rng.random_range(-3.0..=3.0))
                .expect("unit normal");
            let alpha = rng.random_range(0.1..=0.9);
            Codim1Instance {
                op: OperatorExpr::relaxed(alpha, OperatorExpr::Reflector(set.clone())).expect("alpha in (0, 1)"),
                set,
                alpha,
                x0: in_cube(&mut rng, d, 10.0),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Codim1Outcome {
    pub index: usize,
    pub alpha: f64,
    pub codim: usize,
    pub verdict: Verdict,
    pub fejer: serde_json::Value,
    pub asymptotic_regularity: serde_json::Value,
    pub limit: serde_json::Value,
}

pub fn codim1_sweep(seed: u64, count: usize, params: &CheckParams) -> Result<Vec<Codim1Outcome>> {
    codim1_instances(seed, count)
        .into_par_iter()
        .enumerate()
        .map(|(index, inst)| {
            let codim = codimension(&inst.set, inst.x0.dim())?.codim;
            let r = check_codim1_theorem(&inst.op, &inst.set, &inst.x0, params)?;
            let get = |k: &str| r.metadata.get(k).cloned().unwrap_or(serde_json::Value::Null);
            Ok(Codim1Outcome {
                index,
                alpha: inst.alpha,
                codim,
                fejer: get("fejer"),
                asymptotic_regularity: get("asymptotic_regularity"),
                limit: get("limit"),
                verdict: r.verdict,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sum decoupling

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecouplingShape {
    /// Relaxed projections onto `E + K`.
    ProjectionOrbit,
    /// Straight steps against a direction of `K`.
    Drift,
    /// Rotation about a point `E`; steps leave `K^⊕`.
    Rotation,
}

#[derive(Clone, Debug)]
pub struct DecouplingInstance {
    pub e: ConvexSet,
    pub k: ConvexSet,
    pub shape: DecouplingShape,
    pub trajectory: Trajectory,
}

fn random_cone(rng: &mut LabRng, d: usize) -> (ConvexSet, Vector) {
    match rng.random_range(0..3) {
        0 => {
            let dir = unit_sphere(rng, d);
            (ConvexSet::ray(Vector::zeros(d), dir.clone()).expect("nonzero direction"), dir)
        }
        1 => {
            let signs: Vec<i8> = (0..d).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
            let dir = Vector::from_fn(d, |i| signs[i] as f64).normalized().expect("nonzero");
            (ConvexSet::orthant(signs).expect("valid signs"), dir)
        }
        _ => {
            let dir = unit_sphere(rng, d);
            (ConvexSet::linear_span(d, &[dir.clone()]).expect("nonzero"), dir)
        }
    }
}

/// `E` is a point or a ball and `K` a ray, orthant or line, so the sum has
/// a closed-form projector.
pub fn decoupling_instances(seed: u64, count: usize) -> Vec<DecouplingInstance> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let d = 2 + i % 2;
            let shape = match i % 3 {
                0 => DecouplingShape::ProjectionOrbit,
                1 => DecouplingShape::Drift,
                _ => DecouplingShape::Rotation,
            };
            let centre = in_cube(&mut rng, d, 2.0);
            let e = if shape == DecouplingShape::Rotation || rng.random_bool(0.5) {
                ConvexSet::point(centre.clone())
            } else {
                ConvexSet::ball(centre.clone(), rng.random_range(0.5..=2.0)).expect("positive radius")
            };
            let (k, dir) = random_cone(&mut rng, d);
            let x0 = in_ball(&mut rng, &centre, 5.0);
            let points = match shape {
                DecouplingShape::ProjectionOrbit => {
                    let sum = ConvexSet::minkowski_sum(e.clone(), k.clone()).expect("cone");
                    let lambda = rng.random_range(0.2..=1.0);
                    let mut pts = vec![x0];
                    for _ in 0..20 {
                        let x = pts.last().expect("nonempty");
                        let p = sum.project(x).expect("supported");
                        pts.push(x.axpy(lambda, &(&p - x)));
                    }
                    pts
                }
                DecouplingShape::Drift => {
                    let step = rng.random_range(0.5..=1.5);
                    (0..6).map(|n| x0.axpy(-step * n as f64, &dir)).collect()
                }
                DecouplingShape::Rotation => {
                    let r = &x0 - &centre;
                    let th: f64 = rng.random_range(0.2..=1.0);
                    let (s, c) = th.sin_cos();
                    let mut pts = vec![x0.clone()];
                    let mut w = r;
                    // Rotate in the first coordinate plane.
                    for _ in 0..12 {
                        let (a, b) = (w[0], w[1]);
                        w = Vector::from_fn(d, |j| match j {
                            0 => c * a - s * b,
                            1 => s * a + c * b,
                            _ => w[j],
                        });
                        pts.push(&centre + &w);
                    }
                    pts
                }
            };
            DecouplingInstance {
                e,
                k,
                shape,
                trajectory: Trajectory::explicit(format!("{shape:?}"), points).expect("nonempty"),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingOutcome {
    pub index: usize,
    pub shape: DecouplingShape,
    pub e: String,
    pub k: String,
    pub decoupled: Verdict,
    pub direct: serde_json::Value,
    pub agrees: Option<bool>,
}

pub fn decoupling_sweep(seed: u64, count: usize, witnesses: &WitnessSpec, tol: f64) -> Result<Vec<DecouplingOutcome>> {
    decoupling_instances(seed, count)
        .into_par_iter()
        .enumerate()
        .map(|(index, inst)| {
            let spec = WitnessSpec {
                seed: witnesses.seed.wrapping_add(index as u64),
                ..*witnesses
            };
            let r = check_sum_decoupling(&inst.trajectory, &inst.e, &inst.k, &spec, tol)?;
            Ok(DecouplingOutcome {
                index,
                shape: inst.shape,
                e: inst.e.kind_name().into(),
                k: inst.k.kind_name().into(),
                direct: r.metadata.get("direct").cloned().unwrap_or_default(),
                agrees: r.metadata.get("equivalence_agrees").and_then(|v| v.as_bool()),
                decoupled: r.verdict,
            })
        })
        .collect()
}

/// Runs `op` from `x0` and reports the detected limit; used by the scenario
/// runner for quick one-off checks.
pub fn orbit_limit(op: &OperatorExpr, x0: &Vector, n_steps: usize, tail: usize, tol: f64) -> Result<LimitStatus> {
    Ok(detect_limit(&iterate(op, x0, n_steps)?, tail, tol).status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a: Vec<f64> = scalar_instances(3, 20).iter().map(|s| s.x).collect();
        let b: Vec<f64> = scalar_instances(3, 20).iter().map(|s| s.x).collect();
        assert_eq!(a, b);
        assert_ne!(a, scalar_instances(4, 20).iter().map(|s| s.x).collect::<Vec<_>>());
    }

    #[test]
    fn affine_basis_is_fixed_by_l() {
        for inst in affine_instances(1, 12) {
            for b in &inst.fixed_basis {
                assert!(inst.l.apply(b).unwrap().dist(b) < 1e-12);
            }
            assert_eq!(inst.op.certify().is_averaged(), true);
        }
    }

    #[test]
    fn two_ball_pairs_are_disjoint() {
        for inst in two_ball_instances(9, 10, 3) {
            assert!(two_ball_displacement(&inst.a, &inst.b).unwrap().norm() >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn decoupling_shapes_cycle() {
        let shapes: Vec<_> = decoupling_instances(0, 3).into_iter().map(|d| d.shape).collect();
        assert_eq!(
            shapes,
            vec![DecouplingShape::ProjectionOrbit, DecouplingShape::Drift, DecouplingShape::Rotation]
        );
    }
}
