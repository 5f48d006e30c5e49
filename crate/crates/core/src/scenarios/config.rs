use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::analysis::VerdictKind;
use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::vector::Vector;

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

/// A scenario file: named sets, operators and sequences, the trajectories
/// built from them and the checks run on those trajectories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// The result the scenario illustrates.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub anchor: String,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sets: BTreeMap<String, SetConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, OperatorConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sequences: BTreeMap<String, SequenceConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<TrajectoryConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub n_steps: usize,
    pub seed: u64,
    pub tol: f64,
    pub tail_window: usize,
    pub witnesses: usize,
    pub witness_radius: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            n_steps: 1000,
            seed: 0,
            tol: crate::dynamics::DEFAULT_TOL,
            tail_window: crate::dynamics::DEFAULT_TAIL,
            witnesses: 10,
            witness_radius: 10.0,
        }
    }
}

/// A literal set, or the set `{x : x = v + T x}` of a named operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SetConfig {
    Literal(ConvexSet),
    Derived { fixed_set: FixedSetConfig },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedSetConfig {
    pub operator: String,
    #[serde(default)]
    pub displacement: DisplacementSpec,
}

impl<'de> Deserialize<'de> for SetConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = toml::Value::deserialize(d)?;
        let derived = value.as_table().is_some_and(|t| t.contains_key("fixed_set"));
        if derived {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Derived {
                fixed_set: FixedSetConfig,
            }
            let Derived { fixed_set } = Derived::deserialize(value).map_err(D::Error::custom)?;
            Ok(SetConfig::Derived { fixed_set })
        } else {
            ConvexSet::deserialize(value).map(SetConfig::Literal).map_err(D::Error::custom)
        }
    }
}

/// Where a displacement vector comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisplacementSpec {
    #[default]
    Zero,
    Explicit {
        v: Vector,
    },
    /// Closed form for Douglas–Rachford on two balls (named sets).
    TwoBalls {
        a: String,
        b: String,
    },
    /// Tail mean of step differences along an orbit of the operator.
    Estimated {
        start: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<usize>,
        #[serde(default, skip_serializing_if = "is_default")]
        allow_heuristic: bool,
    },
}

/// Operator expression tree; sets are referenced by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Identity,
    Negation,
    Translation {
        b: Vector,
    },
    Linear {
        rows: Vec<Vec<f64>>,
    },
    Affine {
        rows: Vec<Vec<f64>>,
        shift: Vector,
    },
    Projector {
        set: String,
    },
    Reflector {
        set: String,
    },
    /// `(1 - alpha) Id + alpha inner`
    Relaxed {
        alpha: f64,
        inner: Box<OperatorConfig>,
    },
    ConvexCombination {
        alpha: f64,
        left: Box<OperatorConfig>,
        right: Box<OperatorConfig>,
    },
    Compose {
        outer: Box<OperatorConfig>,
        inner: Box<OperatorConfig>,
    },
    DouglasRachford {
        a: String,
        b: String,
    },
    PiecewiseLinear {
        #[serde(default)]
        knots: Vec<f64>,
        slopes: Vec<f64>,
        value_at_zero: f64,
    },
    Drift {
        scale: f64,
    },
}

impl OperatorConfig {
    pub(crate) fn set_refs(&self, out: &mut Vec<String>) {
        use OperatorConfig::*;
        match self {
            Projector { set } | Reflector { set } => out.push(set.clone()),
            DouglasRachford { a, b } => {
                out.push(a.clone());
                out.push(b.clone());
            }
            Relaxed { inner, .. } => inner.set_refs(out),
            ConvexCombination { left, right, .. } => {
                left.set_refs(out);
                right.set_refs(out);
            }
            Compose { outer, inner } => {
                outer.set_refs(out);
                inner.set_refs(out);
            }
            Identity | Negation | Translation { .. } | Linear { .. } | Affine { .. } | PiecewiseLinear { .. }
            | Drift { .. } => {}
        }
    }
}

/// Closed-form sequences that are not orbits of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceConfig {
    /// `x_n = (-1)^n point`
    Alternating { point: Vector },
    /// Points on a circle at angles given by the partial sums of the
    /// harmonic series: `x_n = radius (cos H_n, sin H_n)`.
    HarmonicRotation {
        #[serde(default = "one")]
        radius: f64,
    },
    /// A fixed list of points; `n_steps` is ignored.
    Explicit { points: Vec<Vector> },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub name: String,
    /// Write a CSV for this trajectory when exporting.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub export: bool,
    #[serde(flatten)]
    pub source: TrajectorySource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectorySource {
    Raw {
        operator: String,
        start: Vector,
    },
    Normalized {
        operator: String,
        start: Vector,
        displacement: DisplacementSpec,
    },
    Difference {
        operator: String,
        start: Vector,
        other: Vector,
    },
    Shadow {
        base: String,
        set: String,
    },
    Sequence {
        sequence: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub name: String,
    /// Expected verdict; checks without one are recorded as evidence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_radius: Option<f64>,
    #[serde(flatten)]
    pub kind: CheckKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitKind {
    Converged,
    Diverging,
    Oscillating,
    Inconclusive,
}

impl LimitKind {
    pub fn name(self) -> &'static str {
        match self {
            LimitKind::Converged => "converged",
            LimitKind::Diverging => "diverging",
            LimitKind::Oscillating => "oscillating",
            LimitKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckKind {
    Fejer {
        trajectory: String,
        set: String,
    },
    AsymptoticRegularity {
        trajectory: String,
    },
    /// Limit detection. Passes when every stated expectation holds; with
    /// none stated the status is recorded and the verdict is inconclusive.
    Limit {
        trajectory: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        statuses: Vec<LimitKind>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        growth_rate: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit_point: Option<Vector>,
        /// Tolerance for comparing the growth rate or limit point; the
        /// check's `tol` drives detection.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        match_tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_window: Option<usize>,
    },
    Connectivity {
        trajectory: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_fraction: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    ClusterOrthogonality {
        trajectory: String,
        set: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_fraction: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    SumDecoupling {
        trajectory: String,
        e: String,
        k: String,
    },
    ShadowSuperset {
        trajectory: String,
        set: String,
        superset: String,
    },
    Codim1 {
        trajectory: String,
        set: String,
    },
    DisplacementMatch {
        operator: String,
        start: Vector,
        reference: DisplacementSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<usize>,
        #[serde(default, skip_serializing_if = "is_default")]
        allow_heuristic: bool,
    },
    Nonexpansive {
        operator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_width: Option<f64>,
    },
    /// Empirical averagedness at `alpha`, or at the certified constant.
    Averaged {
        operator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_width: Option<f64>,
    },
    ScalarSweep {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
    },
    AffineSweep {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
    },
    TwoBallSweep {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Codim1Sweep {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_steps: Option<usize>,
    },
    DecouplingSweep {
        count: usize,
    },
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        use CheckKind::*;
        match self {
            Fejer { .. } => "fejer",
            AsymptoticRegularity { .. } => "asymptotic_regularity",
            Limit { .. } => "limit",
            Connectivity { .. } => "connectivity",
            ClusterOrthogonality { .. } => "cluster_orthogonality",
            SumDecoupling { .. } => "sum_decoupling",
            ShadowSuperset { .. } => "shadow_superset",
            Codim1 { .. } => "codim1",
            DisplacementMatch { .. } => "displacement_match",
            Nonexpansive { .. } => "nonexpansive",
            Averaged { .. } => "averaged",
            ScalarSweep { .. } => "scalar_sweep",
            AffineSweep { .. } => "affine_sweep",
            TwoBallSweep { .. } => "two_ball_sweep",
            Codim1Sweep { .. } => "codim1_sweep",
            DecouplingSweep { .. } => "decoupling_sweep",
        }
    }

    fn trajectory_refs(&self) -> Vec<&str> {
        use CheckKind::*;
        match self {
            Fejer { trajectory, .. }
            | AsymptoticRegularity { trajectory }
            | Limit { trajectory, .. }
            | Connectivity { trajectory, .. }
            | ClusterOrthogonality { trajectory, .. }
            | SumDecoupling { trajectory, .. }
            | ShadowSuperset { trajectory, .. }
            | Codim1 { trajectory, .. } => vec![trajectory],
            _ => vec![],
        }
    }

    fn set_refs(&self) -> Vec<&str> {
        use CheckKind::*;
        match self {
            Fejer { set, .. } | ClusterOrthogonality { set, .. } | Codim1 { set, .. } => vec![set],
            SumDecoupling { e, k, .. } => vec![e, k],
            ShadowSuperset { set, superset, .. } => vec![set, superset],
            DisplacementMatch { reference, .. } => displacement_set_refs(reference),
            _ => vec![],
        }
    }

    fn operator_refs(&self) -> Vec<&str> {
        use CheckKind::*;
        match self {
            DisplacementMatch { operator, .. } | Nonexpansive { operator, .. } | Averaged { operator, .. } => {
                vec![operator]
            }
            _ => vec![],
        }
    }
}

fn displacement_set_refs(d: &DisplacementSpec) -> Vec<&str> {
    match d {
        DisplacementSpec::TwoBalls { a, b } => vec![a, b],
        _ => vec![],
    }
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msgs) => Error::Config(msgs.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    /// Checks that every name resolves and names are unique; collects all
    /// problems rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.name.trim().is_empty() {
            errs.push("name: must not be empty".to_string());
        }
        let r = &self.run;
        if r.n_steps == 0 {
            errs.push("run.n_steps: must be positive".into());
        }
        if !(r.tol >= 0.0 && r.tol.is_finite()) {
            errs.push(format!("run.tol: {} is not a nonnegative number", r.tol));
        }
        if r.tail_window == 0 {
            errs.push("run.tail_window: must be positive".into());
        }
        if r.witnesses == 0 {
            errs.push("run.witnesses: must be positive".into());
        }

        let literal: BTreeSet<&str> = self
            .sets
            .iter()
            .filter(|(_, s)| matches!(s, SetConfig::Literal(_)))
            .map(|(k, _)| k.as_str())
            .collect();
        for (name, set) in &self.sets {
            match set {
                SetConfig::Literal(c) => {
                    if let Err(e) = c.validated() {
                        errs.push(format!("sets.{name}: {e}"));
                    }
                }
                SetConfig::Derived { fixed_set } => {
                    if !self.operators.contains_key(&fixed_set.operator) {
                        errs.push(format!("sets.{name}.fixed_set.operator: unknown operator '{}'", fixed_set.operator));
                    }
                    for s in displacement_set_refs(&fixed_set.displacement) {
                        if !literal.contains(s) {
                            errs.push(format!("sets.{name}.fixed_set.displacement: unknown set '{s}'"));
                        }
                    }
                }
            }
        }
        for (name, op) in &self.operators {
            let mut refs = Vec::new();
            op.set_refs(&mut refs);
            for s in refs {
                if !literal.contains(s.as_str()) {
                    let why = if self.sets.contains_key(&s) { "operators may only use literal sets" } else { "unknown set" };
                    errs.push(format!("operators.{name}: {why} '{s}'"));
                }
            }
        }

        let mut seen = BTreeSet::new();
        for (i, t) in self.trajectories.iter().enumerate() {
            let at = format!("trajectories[{i}] ({})", t.name);
            let need_op = |op: &str, errs: &mut Vec<String>| {
                if !self.operators.contains_key(op) {
                    errs.push(format!("{at}.operator: unknown operator '{op}'"));
                }
            };
            match &t.source {
                TrajectorySource::Raw { operator, .. } | TrajectorySource::Difference { operator, .. } => {
                    need_op(operator, &mut errs)
                }
                TrajectorySource::Normalized {
                    operator, displacement, ..
                } => {
                    need_op(operator, &mut errs);
                    for s in displacement_set_refs(displacement) {
                        if !literal.contains(s) {
                            errs.push(format!("{at}.displacement: unknown set '{s}'"));
                        }
                    }
                }
                TrajectorySource::Shadow { base, set } => {
                    if !seen.contains(base.as_str()) {
                        errs.push(format!("{at}.base: '{base}' is not an earlier trajectory"));
                    }
                    if !self.sets.contains_key(set) {
                        errs.push(format!("{at}.set: unknown set '{set}'"));
                    }
                }
                TrajectorySource::Sequence { sequence } => {
                    if !self.sequences.contains_key(sequence) {
                        errs.push(format!("{at}.sequence: unknown sequence '{sequence}'"));
                    }
                }
            }
            if !seen.insert(t.name.as_str()) {
                errs.push(format!("{at}.name: duplicate trajectory name"));
            }
        }

        let mut checks = BTreeSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            let at = format!("checks[{i}] ({})", c.name);
            if !checks.insert(c.name.as_str()) {
                errs.push(format!("{at}.name: duplicate check name"));
            }
            for t in c.kind.trajectory_refs() {
                if !seen.contains(t) {
                    errs.push(format!("{at}.trajectory: unknown trajectory '{t}'"));
                }
            }
            for s in c.kind.set_refs() {
                if !self.sets.contains_key(s) {
                    errs.push(format!("{at}: unknown set '{s}'"));
                }
            }
            for o in c.kind.operator_refs() {
                if !self.operators.contains_key(o) {
                    errs.push(format!("{at}.operator: unknown operator '{o}'"));
                }
            }
            if let Some(t) = c.tol {
                if !(t >= 0.0 && t.is_finite()) {
                    errs.push(format!("{at}.tol: {t} is not a nonnegative number"));
                }
            }
            if c.witnesses == Some(0) {
                errs.push(format!("{at}.witnesses: must be positive"));
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
