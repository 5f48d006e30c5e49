use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::RunArtifacts;
use crate::analysis::DiagnosticsReport;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::vector::Vector;

/// CSV text with header `n,x1,…,xd`; every value has 17 significant digits
/// so parsing it back recovers the same `f64`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.dim();
    let mut out = String::from("n");
    for i in 1..=d {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (n, p) in traj.points.iter().enumerate() {
        let _ = write!(out, "{n}");
        for x in p.as_slice() {
            let _ = write!(out, ",{x:.16e}");
        }
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn export_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write_file(path, &trajectory_csv(traj))
}

/// Inverse of [`trajectory_csv`].
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<Vector>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, msg: &str| Error::InvalidArgument(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let d = header.split(',').count().saturating_sub(1);
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(bad(i + 2, "wrong number of fields"));
            }
            let coords = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| bad(i + 2, "not a number")))
                .collect::<Result<Vec<_>>>()?;
            Vector::new(&coords)
        })
        .collect()
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn export_report(report: &DiagnosticsReport, path: &Path) -> Result<()> {
    write_file(path, &json(report)?)
}

/// Writes `summary.json`, `reports/<check>.json` and, when
/// `with_trajectories` is set, `trajectories/<name>.csv` for every exported
/// trajectory under `<out>/<scenario>/`. Returns the scenario directory.
pub fn write_artifacts(artifacts: &RunArtifacts, out: &Path, with_trajectories: bool) -> Result<PathBuf> {
    let dir = out.join(&artifacts.scenario);
    write_file(&dir.join("summary.json"), &json(&artifacts.summary)?)?;
    for (name, report) in &artifacts.reports {
        export_report(report, &dir.join("reports").join(format!("{name}.json")))?;
    }
    if with_trajectories {
        export_trajectories(artifacts, out, None)?;
    }
    Ok(dir)
}

/// Writes trajectory CSVs under `<out>/<scenario>/trajectories/`; `only`
/// selects one trajectory by name regardless of its export flag.
pub fn export_trajectories(artifacts: &RunArtifacts, out: &Path, only: Option<&str>) -> Result<Vec<PathBuf>> {
    let dir = out.join(&artifacts.scenario).join("trajectories");
    let mut written = Vec::new();
    for t in &artifacts.trajectories {
        let wanted = match only {
            Some(name) => t.name == name,
            None => t.export,
        };
        if wanted {
            let path = dir.join(format!("{}.csv", t.name));
            export_trajectory(&t.trajectory, &path)?;
            written.push(path);
        }
    }
    if let Some(name) = only {
        if written.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "scenario '{}' has no trajectory '{name}'",
                artifacts.scenario
            )));
        }
    }
    Ok(written)
}
