//! Checkers for sequence properties.
//!
//! Universally quantified statements over a set `C` are evaluated on a
//! seeded finite witness set, so a `Pass` from those checkers is a necessary
//! condition only; reports say so in their metadata.

mod cluster;
mod fejer;
mod report;
mod theorems;

pub use cluster::{
    check_cluster_orthogonality, check_connectivity, default_cluster_radius, estimate_cluster_set, ClusterSet,
};
pub use fejer::{check_asymptotic_regularity, check_fejer, check_fejer_against, check_sum_decoupling};
pub use report::{DiagnosticsReport, Verdict, VerdictKind, Witness};
pub use theorems::{check_codim1, check_codim1_theorem, check_shadow_superset};

use serde::{Deserialize, Serialize};

pub(crate) const NECESSARY_ONLY: &str = "necessary-condition (finite witnesses)";

/// How witness points of a set are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub count: usize,
    pub seed: u64,
    /// Witnesses lie within this distance of the set's anchor point.
    pub radius: f64,
}

impl Default for WitnessSpec {
    fn default() -> Self {
        WitnessSpec {
            count: 10,
            seed: 0,
            radius: 10.0,
        }
    }
}

/// Shared knobs for the composite checkers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub tol: f64,
    pub tail_window: usize,
    pub n_steps: usize,
    pub witnesses: WitnessSpec,
    pub tail_fraction: f64,
    pub cluster_radius: Option<f64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            tol: crate::dynamics::DEFAULT_TOL,
            tail_window: crate::dynamics::DEFAULT_TAIL,
            n_steps: crate::dynamics::DEFAULT_STEPS,
            witnesses: WitnessSpec::default(),
            tail_fraction: 0.5,
            cluster_radius: None,
        }
    }
}
