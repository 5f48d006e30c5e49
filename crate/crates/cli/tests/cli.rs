use std::path::Path;
use std::process::{Command, Output};

fn fejerlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fejerlab"))
        .args(args)
        .env("FEJERLAB_OUT", out)
        .output()
        .expect("binary runs")
}

#[test]
fn list_names_every_builtin() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fejerlab(&["list"], tmp.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["alternating-pair", "dr-two-balls-r3", "open-problem-p4"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn run_writes_artifacts_under_env_out() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fejerlab(&["run", "alternating-pair"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let dir = tmp.path().join("alternating-pair");
    assert!(dir.join("summary.json").is_file());
    assert!(dir.join("reports/fejer.json").is_file());
    assert!(dir.join("trajectories/x.csv").is_file());
}

#[test]
fn out_flag_overrides_env() {
    let tmp = tempfile::tempdir().unwrap();
    let flag = tmp.path().join("flag");
    let env = tmp.path().join("env");
    let o = fejerlab(&["run", "negation-r1", "--out", flag.to_str().unwrap()], &env);
    assert!(o.status.success());
    assert!(flag.join("negation-r1/summary.json").is_file());
    assert!(!env.exists());
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(fejerlab(&["run", "no-such-scenario"], tmp.path()).status.code(), Some(2));
}

#[test]
fn bad_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "name = \"bad\"\n[operators.t]\ntype = \"projector\"\nset = \"missing\"\n").unwrap();
    let o = fejerlab(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
}

const TRANSLATION: &str = r#"
name = "shift"

[run]
n_steps = 50

[operators.t]
type = "translation"
b = [1.0, 0.0]

[[trajectories]]
name = "orbit"
kind = "raw"
operator = "t"
start = [0.0, 0.0]

[[checks]]
name = "limit"
kind = "limit"
trajectory = "orbit"
statuses = ["diverging"]
expect = "EXPECT"
"#;

#[test]
fn exit_code_tracks_expectations() {
    let tmp = tempfile::tempdir().unwrap();
    for (expect, code) in [("pass", 0), ("fail", 1)] {
        let cfg = tmp.path().join(format!("{expect}.toml"));
        std::fs::write(&cfg, TRANSLATION.replace("EXPECT", expect)).unwrap();
        let o = fejerlab(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(code), "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn steps_override_sets_csv_length() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("t.toml");
    std::fs::write(&cfg, TRANSLATION.replace("EXPECT", "pass")).unwrap();
    let o = fejerlab(&["export", "--config", cfg.to_str().unwrap(), "--steps", "7"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("shift/trajectories/orbit.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    assert!(csv.starts_with("n,x1,x2\n"));
}

#[test]
fn export_of_unknown_trajectory_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fejerlab(&["export", "negation-r1", "--trajectory", "nope"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
