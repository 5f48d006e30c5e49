//! Empirical checks of nonexpansiveness and averagedness on random pairs.

use crate::analysis::{DiagnosticsReport, Verdict};
use crate::error::Result;
use crate::random;
use crate::vector::Vector;

use super::OperatorExpr;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Pairs are drawn from `[-half_width, half_width]^d`.
    pub half_width: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            seed: 0,
            tol: 1e-9,
            half_width: 10.0,
        }
    }
}

struct Worst {
    violation: f64,
    pair: Option<(Vector, Vector)>,
}

fn sweep(
    op: &OperatorExpr,
    dim: usize,
    opts: &VerifyOptions,
    excess: impl Fn(&Vector, &Vector, &Vector, &Vector) -> f64,
) -> Result<Worst> {
    let mut rng = random::rng(opts.seed);
    let mut worst = Worst {
        violation: f64::NEG_INFINITY,
        pair: None,
    };
    for _ in 0..opts.trials.max(1) {
        let x = random::in_cube(&mut rng, dim, opts.half_width);
        let y = random::in_cube(&mut rng, dim, opts.half_width);
        let tx = op.apply(&x)?;
        let ty = op.apply(&y)?;
        let e = excess(&x, &y, &tx, &ty);
        if e > worst.violation {
            worst.violation = e;
            worst.pair = Some((x, y));
        }
    }
    Ok(worst)
}

fn finish(name: &str, op: &OperatorExpr, dim: usize, opts: &VerifyOptions, worst: Worst, quantity: &str) -> DiagnosticsReport {
    let verdict = if worst.violation <= opts.tol {
        Verdict::Pass
    } else {
        Verdict::fail(None, worst.pair.as_ref().map(|p| p.0.clone()), quantity, worst.violation)
    };
    DiagnosticsReport::new(name, verdict)
        .param("operator", op.describe())
        .param("dim", dim)
        .param("trials", opts.trials)
        .param("tol", opts.tol)
        .param("half_width", opts.half_width)
        .with_seed(opts.seed)
        .meta("worst_violation", worst.violation)
        .meta("worst_pair", worst.pair)
}

/// Pass iff `‖Tx - Ty‖ <= ‖x - y‖ + tol` on every sampled pair.
pub fn verify_nonexpansive(op: &OperatorExpr, dim: usize, opts: &VerifyOptions) -> Result<DiagnosticsReport> {
    let worst = sweep(op, dim, opts, |x, y, tx, ty| tx.dist(ty) - x.dist(y))?;
    Ok(finish("nonexpansive", op, dim, opts, worst, "norm expansion"))
}

/// Pass iff `‖Tx - Ty‖² + (1-α)/α ‖(Id-T)x - (Id-T)y‖² <= ‖x - y‖² + tol`
/// on every sampled pair.
pub fn verify_averaged(op: &OperatorExpr, alpha: f64, dim: usize, opts: &VerifyOptions) -> Result<DiagnosticsReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(crate::Error::InvalidArgument(format!(
            "averaging constant must lie in (0, 1), got {alpha}"
        )));
    }
    let worst = sweep(op, dim, opts, |x, y, tx, ty| averaged_excess(alpha, x, y, tx, ty))?;
    Ok(finish("averaged", op, dim, opts, worst, "averagedness inequality excess").param("alpha", alpha))
}

pub(crate) fn averaged_excess(alpha: f64, x: &Vector, y: &Vector, tx: &Vector, ty: &Vector) -> f64 {
    let rx = x - tx;
    let ry = y - ty;
    tx.dist(ty).powi(2) + (1.0 - alpha) / alpha * rx.dist(&ry).powi(2) - x.dist(y).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexSet;
    use crate::operators::Matrix;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn negation_is_nonexpansive_but_not_averaged() {
        let opts = VerifyOptions::default();
        let r = verify_nonexpansive(&OperatorExpr::Negation, 2, &opts).unwrap();
        assert!(r.verdict.is_pass());
        // Direct substitution at the pair (1, 0): 1 + 4 <= 1 fails by 4 at α = 1/2.
        let e = averaged_excess(0.5, &v(&[1.0]), &v(&[0.0]), &v(&[-1.0]), &v(&[0.0]));
        assert_eq!(e, 4.0);
        for k in 1..10 {
            let a = k as f64 / 10.0;
            let r = verify_averaged(&OperatorExpr::Negation, a, 1, &opts).unwrap();
            assert!(r.verdict.is_fail(), "alpha {a}");
        }
    }

    #[test]
    fn doubling_fails_by_about_the_distance() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = verify_nonexpansive(&OperatorExpr::Linear(m), 2, &VerifyOptions::default()).unwrap();
        match &r.verdict {
            Verdict::Fail { witness } => assert!(witness.magnitude > 10.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn projector_is_firmly_nonexpansive_and_identity_is_tight() {
        let p = OperatorExpr::Projector(ConvexSet::ball(v(&[1.0, 0.0]), 2.0).unwrap());
        let opts = VerifyOptions::default();
        assert!(verify_averaged(&p, 0.5, 2, &opts).unwrap().verdict.is_pass());
        let r = verify_averaged(&OperatorExpr::Identity, 0.3, 3, &opts).unwrap();
        assert!(r.verdict.is_pass());
        assert_eq!(r.metadata["worst_violation"].as_f64().unwrap().abs(), 0.0);
    }

    #[test]
    fn two_ball_douglas_rachford_is_nonexpansive() {
        let a = ConvexSet::ball(v(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        let b = ConvexSet::ball(v(&[5.0, 0.0, 0.0]), 1.0).unwrap();
        let dr = OperatorExpr::douglas_rachford(a, b).unwrap();
        let opts = VerifyOptions::default();
        assert!(verify_nonexpansive(&dr, 3, &opts).unwrap().verdict.is_pass());
        assert!(verify_averaged(&dr, 0.5, 3, &opts).unwrap().verdict.is_pass());
    }
}
