use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::*;
use crate::analysis::{
    check_asymptotic_regularity, check_cluster_orthogonality, check_codim1, check_connectivity, check_fejer,
    check_shadow_superset, check_sum_decoupling, default_cluster_radius, estimate_cluster_set, CheckParams,
    DiagnosticsReport, Verdict, VerdictKind, WitnessSpec,
};
use crate::dynamics::{
    detect_limit, difference_orbit, estimate_displacement, iterate, normalized_orbit, shadow, two_ball_displacement,
    LimitStatus, Trajectory, DEFAULT_STEPS,
};
use crate::error::{Error, Result};
use crate::experiments;
use crate::geometry::ConvexSet;
use crate::operators::{
    fixed_set_description, verify_averaged, verify_nonexpansive, Matrix, OperatorExpr, PiecewiseLinear, VerifyOptions,
};
use crate::vector::Vector;

/// Bound for the monotonicity invariants of scalar difference orbits.
pub const INVARIANT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NamedTrajectory {
    pub name: String,
    pub export: bool,
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub checker: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<VerdictKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictKind>,
    /// `None` for evidence-only checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub n_steps: usize,
    pub tol: f64,
    pub checks: Vec<CheckOutcome>,
    /// Trajectories that could not be built, with the error.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub trajectory_errors: BTreeMap<String, String>,
    /// Every declared expectation was met.
    pub all_matched: bool,
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub scenario: String,
    pub trajectories: Vec<NamedTrajectory>,
    pub sets: BTreeMap<String, ConvexSet>,
    pub operators: BTreeMap<String, OperatorExpr>,
    /// One report per check that ran to completion, in declared order.
    pub reports: Vec<(String, DiagnosticsReport)>,
    pub summary: RunSummary,
}

impl RunArtifacts {
    pub fn trajectory(&self, name: &str) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.name == name).map(|t| &t.trajectory)
    }

    pub fn report(&self, check: &str) -> Option<&DiagnosticsReport> {
        self.reports.iter().find(|(n, _)| n == check).map(|(_, r)| r)
    }
}

fn build_operator(cfg: &OperatorConfig, sets: &BTreeMap<String, ConvexSet>) -> Result<OperatorExpr> {
    use OperatorConfig as C;
    let set = |name: &String| {
        sets.get(name)
            .cloned()
            .ok_or_else(|| Error::config(format!("unknown set '{name}'")))
    };
    Ok(match cfg {
        C::Identity => OperatorExpr::Identity,
        C::Negation => OperatorExpr::Negation,
        C::Translation { b } => OperatorExpr::Translation(b.clone()),
        C::Linear { rows } => OperatorExpr::Linear(Matrix::from_rows(rows)?),
        C::Affine { rows, shift } => {
            let linear = Matrix::from_rows(rows)?;
            shift.expect_dim(linear.nrows())?;
            OperatorExpr::Affine {
                linear,
                shift: shift.clone(),
            }
        }
        C::Projector { set: s } => OperatorExpr::Projector(set(s)?),
        C::Reflector { set: s } => OperatorExpr::Reflector(set(s)?),
        C::Relaxed { alpha, inner } => OperatorExpr::relaxed(*alpha, build_operator(inner, sets)?)?,
        C::ConvexCombination { alpha, left, right } => {
            OperatorExpr::convex_combination(*alpha, build_operator(left, sets)?, build_operator(right, sets)?)?
        }
        C::Compose { outer, inner } => OperatorExpr::compose(build_operator(outer, sets)?, build_operator(inner, sets)?),
        C::DouglasRachford { a, b } => OperatorExpr::douglas_rachford(set(a)?, set(b)?)?,
        C::PiecewiseLinear {
            knots,
            slopes,
            value_at_zero,
        } => OperatorExpr::ScalarPiecewiseLinear(PiecewiseLinear::new(knots.clone(), slopes.clone(), *value_at_zero)?),
        C::Drift { scale } => OperatorExpr::vanishing_drift(*scale)?,
    })
}

fn resolve_displacement(
    spec: &DisplacementSpec,
    op: &OperatorExpr,
    dim: Option<usize>,
    sets: &BTreeMap<String, ConvexSet>,
    run: &RunParams,
) -> Result<Vector> {
    let set = |name: &String| {
        sets.get(name)
            .ok_or_else(|| Error::config(format!("unknown set '{name}'")))
    };
    match spec {
        DisplacementSpec::Zero => {
            let d = dim.or(op.dim()).ok_or_else(|| {
                Error::config("cannot infer the dimension of a zero displacement; give it explicitly")
            })?;
            Ok(Vector::zeros(d))
        }
        DisplacementSpec::Explicit { v } => Ok(v.clone()),
        DisplacementSpec::TwoBalls { a, b } => two_ball_displacement(set(a)?, set(b)?),
        DisplacementSpec::Estimated {
            start,
            n_steps,
            tail,
            allow_heuristic,
        } => {
            let n = n_steps.unwrap_or(run.n_steps);
            let tail = tail.unwrap_or(run.tail_window.min(n / 2).max(1));
            Ok(estimate_displacement(op, start, n, tail, *allow_heuristic)?.v)
        }
    }
}

fn build_sequence(cfg: &SequenceConfig, n_steps: usize, label: &str) -> Result<Trajectory> {
    let points = match cfg {
        SequenceConfig::Alternating { point } => (0..=n_steps)
            .map(|n| if n % 2 == 0 { point.clone() } else { point.map(|x| 0.0 - x) })
            .collect(),
        SequenceConfig::HarmonicRotation { radius } => {
            let mut h = 0.0_f64;
            (0..=n_steps)
                .map(|n| {
                    if n > 0 {
                        h += 1.0 / n as f64;
                    }
                    Vector::new(&[radius * h.cos(), radius * h.sin()]).expect("two coordinates")
                })
                .collect()
        }
        SequenceConfig::Explicit { points } => points.clone(),
    };
    Trajectory::explicit(label, points)
}

struct Context<'a> {
    spec: &'a ScenarioSpec,
    sets: BTreeMap<String, ConvexSet>,
    operators: BTreeMap<String, OperatorExpr>,
    trajectories: BTreeMap<String, std::result::Result<Arc<Trajectory>, String>>,
}

impl Context<'_> {
    fn trajectory(&self, name: &str) -> Result<&Trajectory> {
        match self.trajectories.get(name) {
            Some(Ok(t)) => Ok(t),
            Some(Err(e)) => Err(Error::InvalidArgument(format!("trajectory '{name}' failed: {e}"))),
            None => Err(Error::config(format!("unknown trajectory '{name}'"))),
        }
    }

    fn set(&self, name: &str) -> Result<&ConvexSet> {
        self.sets
            .get(name)
            .ok_or_else(|| Error::config(format!("unknown set '{name}'")))
    }

    fn operator(&self, name: &str) -> Result<&OperatorExpr> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::config(format!("unknown operator '{name}'")))
    }
}

fn build_trajectory(ctx: &Context, cfg: &TrajectoryConfig) -> Result<Trajectory> {
    let run = &ctx.spec.run;
    match &cfg.source {
        TrajectorySource::Raw { operator, start } => iterate(ctx.operator(operator)?, start, run.n_steps),
        TrajectorySource::Normalized {
            operator,
            start,
            displacement,
        } => {
            let op = ctx.operator(operator)?;
            let v = resolve_displacement(displacement, op, Some(start.dim()), &ctx.sets, run)?;
            normalized_orbit(op, start, &v, run.n_steps)
        }
        TrajectorySource::Difference { operator, start, other } => {
            difference_orbit(ctx.operator(operator)?, start, other, run.n_steps)
        }
        TrajectorySource::Shadow { base, set } => shadow(ctx.trajectory(base)?, ctx.set(set)?),
        TrajectorySource::Sequence { sequence } => {
            let cfg = ctx
                .spec
                .sequences
                .get(sequence)
                .ok_or_else(|| Error::config(format!("unknown sequence '{sequence}'")))?;
            build_sequence(cfg, run.n_steps, sequence)
        }
    }
}

fn cluster_for(
    traj: &Trajectory,
    tail_fraction: Option<f64>,
    radius: Option<f64>,
    tol: f64,
) -> Result<crate::analysis::ClusterSet> {
    let tf = tail_fraction.unwrap_or(0.5);
    let r = radius.unwrap_or_else(|| default_cluster_radius(traj, tf, tol));
    estimate_cluster_set(traj, tf, r)
}

fn op_dim(op: &OperatorExpr) -> Result<usize> {
    op.dim()
        .ok_or_else(|| Error::config("operator dimension cannot be inferred; use a dimension-carrying node"))
}

fn sweep_report<T: Serialize>(checker: &str, failures: usize, total: usize, outcomes: &[T]) -> DiagnosticsReport {
    let verdict = if failures == 0 {
        Verdict::Pass
    } else {
        Verdict::fail(None, None, "failing instances", failures as f64)
    };
    DiagnosticsReport::new(checker, verdict)
        .param("count", total)
        .meta("failures", failures)
        .meta("instances", outcomes)
}

fn run_check(ctx: &Context, cfg: &CheckConfig) -> Result<DiagnosticsReport> {
    let run = &ctx.spec.run;
    let tol = cfg.tol.unwrap_or(run.tol);
    let seed = cfg.seed.unwrap_or(run.seed);
    let ws = WitnessSpec {
        count: cfg.witnesses.unwrap_or(run.witnesses),
        seed,
        radius: cfg.witness_radius.unwrap_or(run.witness_radius),
    };
    let params = CheckParams {
        tol,
        tail_window: run.tail_window,
        n_steps: run.n_steps,
        witnesses: ws,
        ..CheckParams::default()
    };
    let verify = |trials: &Option<usize>, half_width: &Option<f64>| VerifyOptions {
        trials: trials.unwrap_or(VerifyOptions::default().trials),
        seed,
        tol,
        half_width: half_width.unwrap_or(VerifyOptions::default().half_width),
    };

    use CheckKind as K;
    let report = match &cfg.kind {
        K::Fejer { trajectory, set } => check_fejer(ctx.trajectory(trajectory)?, ctx.set(set)?, &ws, tol)?,
        K::AsymptoticRegularity { trajectory } => check_asymptotic_regularity(ctx.trajectory(trajectory)?, tol)?,
        K::Limit {
            trajectory,
            statuses,
            growth_rate,
            limit_point,
            match_tol,
            tail_window,
        } => {
            let est = detect_limit(ctx.trajectory(trajectory)?, tail_window.unwrap_or(run.tail_window), tol);
            let mt = match_tol.unwrap_or(tol);
            let mut failure: Option<(String, f64, Option<Vector>)> = None;
            if !statuses.is_empty() && !statuses.iter().any(|s| s.name() == est.status.name()) {
                failure = Some((format!("status {}", est.status.name()), 1.0, None));
            }
            if let Some(g) = growth_rate {
                match &est.status {
                    LimitStatus::Diverging { norm_growth_rate } if (norm_growth_rate - g).abs() <= mt => {}
                    LimitStatus::Diverging { norm_growth_rate } => {
                        failure.get_or_insert(("growth rate error".into(), (norm_growth_rate - g).abs(), None));
                    }
                    other => {
                        failure.get_or_insert((format!("status {} has no growth rate", other.name()), 1.0, None));
                    }
                }
            }
            if let Some(p) = limit_point {
                match &est.status {
                    LimitStatus::Converged { limit, .. } if limit.dist(p) <= mt => {}
                    LimitStatus::Converged { limit, .. } => {
                        failure.get_or_insert(("limit point error".into(), limit.dist(p), Some(limit.clone())));
                    }
                    other => {
                        failure.get_or_insert((format!("status {} has no limit point", other.name()), 1.0, None));
                    }
                }
            }
            let stated = !statuses.is_empty() || growth_rate.is_some() || limit_point.is_some();
            let verdict = match failure {
                Some((q, m, p)) => Verdict::fail(None, p, q, m),
                None if stated => Verdict::Pass,
                None => Verdict::inconclusive("no expectation stated; status recorded as evidence"),
            };
            DiagnosticsReport::new("limit", verdict)
                .param("tol", tol)
                .param("match_tol", mt)
                .param("tail_window", est.tail_window)
                .meta("estimate", &est)
        }
        K::Connectivity {
            trajectory,
            tail_fraction,
            radius,
        } => {
            let cluster = cluster_for(ctx.trajectory(trajectory)?, *tail_fraction, *radius, tol)?;
            check_connectivity(&cluster)?
                .param("tail_fraction", tail_fraction.unwrap_or(0.5))
                .meta("cluster_set", &cluster)
        }
        K::ClusterOrthogonality {
            trajectory,
            set,
            tail_fraction,
            radius,
        } => {
            let cluster = cluster_for(ctx.trajectory(trajectory)?, *tail_fraction, *radius, run.tol)?;
            check_cluster_orthogonality(&cluster, ctx.set(set)?, &ws, tol)?.param("radius", cluster.radius)
        }
        K::SumDecoupling { trajectory, e, k } => {
            check_sum_decoupling(ctx.trajectory(trajectory)?, ctx.set(e)?, ctx.set(k)?, &ws, tol)?
        }
        K::ShadowSuperset {
            trajectory,
            set,
            superset,
        } => check_shadow_superset(ctx.trajectory(trajectory)?, ctx.set(set)?, ctx.set(superset)?, &params)?,
        K::Codim1 { trajectory, set } => check_codim1(ctx.trajectory(trajectory)?, ctx.set(set)?, &params)?,
        K::DisplacementMatch {
            operator,
            start,
            reference,
            n_steps,
            tail,
            allow_heuristic,
        } => {
            let op = ctx.operator(operator)?;
            let n = n_steps.unwrap_or(run.n_steps);
            let tail = tail.unwrap_or(run.tail_window.min(n / 2).max(1));
            let est = estimate_displacement(op, start, n, tail, *allow_heuristic)?;
            let v = resolve_displacement(reference, op, Some(start.dim()), &ctx.sets, run)?;
            let err = est.v.dist(&v);
            let verdict = if err <= tol {
                Verdict::Pass
            } else {
                Verdict::fail(Some(n), Some(est.v.clone()), "distance to reference displacement", err)
            };
            DiagnosticsReport::new("displacement_match", verdict)
                .param("n_steps", n)
                .param("tail", tail)
                .param("tol", tol)
                .meta("estimate", &est)
                .meta("reference", &v)
                .meta("error", err)
        }
        K::Nonexpansive {
            operator,
            trials,
            half_width,
        } => {
            let op = ctx.operator(operator)?;
            verify_nonexpansive(op, op_dim(op)?, &verify(trials, half_width))?
        }
        K::Averaged {
            operator,
            alpha,
            trials,
            half_width,
        } => {
            let op = ctx.operator(operator)?;
            let cert = op.certify();
            let a = alpha.or(cert.alpha()).ok_or_else(|| {
                Error::InvalidArgument(format!("no alpha given and the operator is only {cert:?}"))
            })?;
            let a = if a <= 0.0 { 0.5 } else { a };
            verify_averaged(op, a, op_dim(op)?, &verify(trials, half_width))?.meta("certificate", cert)
        }
        K::ScalarSweep { count, n_steps } => {
            let n = n_steps.unwrap_or(DEFAULT_STEPS);
            let out = experiments::scalar_sweep(seed, *count, n, run.tail_window, run.tol)?;
            let bad = out
                .iter()
                .filter(|o| {
                    !matches!(o.limit, LimitStatus::Converged { .. })
                        || o.max_increase > INVARIANT_TOL
                        || o.max_flip_excess > INVARIANT_TOL
                })
                .count();
            sweep_report("scalar_sweep", bad, *count, &out)
                .param("n_steps", n)
                .param("invariant_tol", INVARIANT_TOL)
                .with_seed(seed)
        }
        K::AffineSweep { count, n_steps } => {
            let n = n_steps.unwrap_or(DEFAULT_STEPS);
            let out = experiments::affine_sweep(seed, *count, n, run.tail_window, run.tol)?;
            let bad = out.iter().filter(|o| o.error.is_none_or(|e| e > tol)).count();
            sweep_report("affine_sweep", bad, *count, &out)
                .param("n_steps", n)
                .param("tol", tol)
                .with_seed(seed)
        }
        K::TwoBallSweep { count, n_steps, dim } => {
            let n = n_steps.unwrap_or(DEFAULT_STEPS);
            let out = experiments::two_ball_sweep(
                seed,
                *count,
                dim.unwrap_or(3),
                n,
                run.tail_window.min(n / 2).max(1),
                &ws,
                run.tol,
            )?;
            let bad = out.iter().filter(|o| o.error > tol || !o.fejer.is_pass()).count();
            sweep_report("two_ball_sweep", bad, *count, &out)
                .param("n_steps", n)
                .param("tol", tol)
                .with_seed(seed)
        }
        K::Codim1Sweep { count, n_steps } => {
            let p = CheckParams {
                n_steps: n_steps.unwrap_or(DEFAULT_STEPS),
                ..params
            };
            let out = experiments::codim1_sweep(seed, *count, &p)?;
            let bad = out.iter().filter(|o| !o.verdict.is_pass()).count();
            sweep_report("codim1_sweep", bad, *count, &out)
                .param("n_steps", p.n_steps)
                .param("tol", tol)
                .with_seed(seed)
        }
        K::DecouplingSweep { count } => {
            let out = experiments::decoupling_sweep(seed, *count, &ws, tol)?;
            let bad = out.iter().filter(|o| o.agrees != Some(true)).count();
            sweep_report("decoupling_sweep", bad, *count, &out)
                .param("tol", tol)
                .param("witnesses", ws.count)
                .with_seed(seed)
        }
    };
    Ok(report)
}

/// Builds everything the spec declares and runs its checks. Configuration
/// problems abort with [`Error::Config`]; failures inside a check are
/// attached to that check's outcome.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunArtifacts> {
    spec.validate()?;
    let run = &spec.run;
    let mut errs = Vec::new();

    let mut sets = BTreeMap::new();
    for (name, s) in &spec.sets {
        if let SetConfig::Literal(c) = s {
            match c.validated() {
                Ok(c) => {
                    sets.insert(name.clone(), c);
                }
                Err(e) => errs.push(format!("sets.{name}: {e}")),
            }
        }
    }
    let mut operators = BTreeMap::new();
    for (name, o) in &spec.operators {
        match build_operator(o, &sets) {
            Ok(op) => {
                operators.insert(name.clone(), op);
            }
            Err(e) => errs.push(format!("operators.{name}: {e}")),
        }
    }
    for (name, s) in &spec.sets {
        if let SetConfig::Derived { fixed_set } = s {
            let Some(op) = operators.get(&fixed_set.operator) else {
                continue;
            };
            let derived = resolve_displacement(&fixed_set.displacement, op, None, &sets, run).and_then(|v| {
                fixed_set_description(op, &v).ok_or_else(|| {
                    Error::config(format!("no closed form for the fixed set of {} at v = {v:?}", op.describe()))
                })
            });
            match derived {
                Ok(c) => {
                    sets.insert(name.clone(), c);
                }
                Err(e) => errs.push(format!("sets.{name}: {e}")),
            }
        }
    }
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }

    let mut ctx = Context {
        spec,
        sets,
        operators,
        trajectories: BTreeMap::new(),
    };
    let mut trajectories = Vec::new();
    for cfg in &spec.trajectories {
        let built = build_trajectory(&ctx, cfg);
        if let Ok(t) = &built {
            trajectories.push(NamedTrajectory {
                name: cfg.name.clone(),
                export: cfg.export,
                trajectory: t.clone(),
            });
        }
        ctx.trajectories
            .insert(cfg.name.clone(), built.map(Arc::new).map_err(|e| e.to_string()));
    }

    let results: Vec<Result<DiagnosticsReport>> = spec.checks.par_iter().map(|c| run_check(&ctx, c)).collect();
    let mut outcomes = Vec::new();
    let mut reports = Vec::new();
    for (cfg, res) in spec.checks.iter().zip(results) {
        let mut o = CheckOutcome {
            name: cfg.name.clone(),
            checker: cfg.kind.name().to_string(),
            expected: cfg.expect,
            verdict: None,
            matched: None,
            error: None,
        };
        match res {
            Ok(r) => {
                let kind = r.verdict.kind();
                o.verdict = Some(kind);
                o.matched = cfg.expect.map(|e| e == kind);
                reports.push((cfg.name.clone(), r));
            }
            Err(e) => {
                o.error = Some(e.to_string());
                o.matched = cfg.expect.map(|_| false);
            }
        }
        outcomes.push(o);
    }
    let trajectory_errors: BTreeMap<String, String> = ctx
        .trajectories
        .iter()
        .filter_map(|(k, v)| v.as_ref().err().map(|e| (k.clone(), e.clone())))
        .collect();
    let all_matched = outcomes.iter().all(|o| o.matched != Some(false));
    Ok(RunArtifacts {
        scenario: spec.name.clone(),
        trajectories,
        sets: ctx.sets,
        operators: ctx.operators,
        reports,
        summary: RunSummary {
            scenario: spec.name.clone(),
            seed: run.seed,
            n_steps: run.n_steps,
            tol: run.tol,
            checks: outcomes,
            trajectory_errors,
            all_matched,
        },
    })
}
