//! Named scenarios: built-in reproductions and config-driven custom runs,
//! with CSV and JSON export.

mod builtin;
mod config;
mod export;
mod runner;

pub use builtin::{builtin, builtin_specs, list_scenarios, ScenarioInfo};
pub use config::*;
pub use export::{
    export_report, export_trajectories, export_trajectory, read_trajectory_csv, trajectory_csv, write_artifacts,
};
pub use runner::{run_scenario, CheckOutcome, NamedTrajectory, RunArtifacts, RunSummary, INVARIANT_TOL};
