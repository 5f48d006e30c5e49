use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fejerlab::scenarios::{builtin, export_trajectories, list_scenarios, run_scenario, write_artifacts, ScenarioSpec};
use fejerlab::Error;

/// Run Fejér-monotonicity scenarios and export their trajectories and reports.
#[derive(Parser)]
#[command(name = "fejerlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a config file and write its artifacts.
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, env = "FEJERLAB_OUT", default_value = "fejerlab-out")]
        out: PathBuf,
        /// Skip the trajectory CSVs and write only the summary and reports.
        #[arg(long)]
        no_trajectories: bool,
    },
    /// List the built-in scenarios.
    List,
    /// Run a scenario and write trajectory CSVs only.
    Export {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, env = "FEJERLAB_OUT", default_value = "fejerlab-out")]
        out: PathBuf,
        /// Export this trajectory even if the scenario marks it as not exported.
        #[arg(long)]
        trajectory: Option<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in scenario name.
    scenario: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(source: &Source, overrides: &Overrides) -> Result<ScenarioSpec, Error> {
    let mut spec = match (&source.scenario, &source.config) {
        (_, Some(path)) => ScenarioSpec::from_file(path)?,
        (Some(name), None) => builtin(name).ok_or_else(|| {
            let known: Vec<String> = list_scenarios().into_iter().map(|s| s.name).collect();
            Error::Config(vec![format!("unknown scenario '{name}' (known: {})", known.join(", "))])
        })?,
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(n) = overrides.steps {
        spec.run.n_steps = n;
    }
    if let Some(s) = overrides.seed {
        spec.run.seed = s;
    }
    if let Some(t) = overrides.tol {
        spec.run.tol = t;
    }
    spec.validate()?;
    Ok(spec)
}

fn run(source: &Source, overrides: &Overrides, out: &PathBuf, with_trajectories: bool) -> Result<u8, Error> {
    let spec = load(source, overrides)?;
    let artifacts = run_scenario(&spec)?;
    let dir = write_artifacts(&artifacts, out, with_trajectories)?;
    let summary = &artifacts.summary;
    for c in &summary.checks {
        let verdict = c.verdict.map_or("error", |v| v.name());
        let status = match c.matched {
            Some(true) => "ok",
            Some(false) => "MISMATCH",
            None => "evidence",
        };
        print!("{status:<9} {:<32} {verdict}", c.name);
        if let Some(e) = c.expected {
            print!(" (expected {})", e.name());
        }
        if let Some(err) = &c.error {
            print!(": {err}");
        }
        println!();
    }
    for (name, err) in &summary.trajectory_errors {
        println!("trajectory {name}: {err}");
    }
    println!("artifacts in {}", dir.display());
    Ok(if summary.all_matched { 0 } else { EXIT_MISMATCH })
}

fn export(source: &Source, overrides: &Overrides, out: &PathBuf, only: Option<&str>) -> Result<u8, Error> {
    let spec = load(source, overrides)?;
    let artifacts = run_scenario(&spec)?;
    for path in export_trajectories(&artifacts, out, only)? {
        println!("{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            for s in list_scenarios() {
                println!("{:<24} [{}] {}", s.name, s.anchor, s.description);
            }
            Ok(0)
        }
        Command::Run {
            source,
            overrides,
            out,
            no_trajectories,
        } => run(source, overrides, out, !no_trajectories),
        Command::Export {
            source,
            overrides,
            out,
            trajectory,
        } => export(source, overrides, out, trajectory.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidArgument(_) | Error::Io { .. } => EXIT_CONFIG,
                _ => EXIT_MISMATCH,
            })
        }
    }
}
