use fejerlab::dynamics::Trajectory;
use fejerlab::scenarios::{
    builtin, builtin_specs, export_report, export_trajectory, read_trajectory_csv, run_scenario, trajectory_csv,
    ScenarioSpec,
};
use fejerlab::{Error, Vector};
use proptest::prelude::*;

#[test]
fn every_builtin_matches_its_expectations() {
    for spec in builtin_specs() {
        let run = run_scenario(&spec).unwrap();
        assert!(run.summary.all_matched, "{}: {:#?}", spec.name, run.summary);
        assert!(run.summary.trajectory_errors.is_empty(), "{}", spec.name);
        let names: Vec<&str> = run.summary.checks.iter().map(|c| c.name.as_str()).collect();
        let declared: Vec<&str> = spec.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, declared, "summary covers each check once, in order");
    }
}

#[test]
fn open_problems_only_expect_well_defined_subchecks() {
    for spec in builtin_specs().into_iter().filter(|s| s.name.starts_with("open-problem")) {
        for c in &spec.checks {
            if c.kind.name() == "limit" || c.kind.name() == "codim1" {
                assert!(c.expect.is_none(), "{}/{} carries a convergence expectation", spec.name, c.name);
            }
        }
    }
}

#[test]
fn builtin_configs_round_trip() {
    for spec in builtin_specs() {
        let text = spec.to_toml().unwrap();
        assert_eq!(ScenarioSpec::from_toml(&text).unwrap(), spec, "{}", spec.name);
    }
}

#[test]
fn validation_reports_every_bad_field() {
    let text = r#"
name = "broken"

[run]
n_steps = 0

[sets.a]
type = "ball"
center = [0.0, 0.0]
radius = 1.0

[operators.p]
type = "projector"
set = "nowhere"

[[trajectories]]
name = "x"
kind = "raw"
operator = "missing_op"
start = [1.0, 1.0]

[[checks]]
name = "f"
kind = "fejer"
trajectory = "y"
set = "a"
"#;
    let Err(Error::Config(msgs)) = ScenarioSpec::from_toml(text) else {
        panic!("expected a config error");
    };
    let all = msgs.join("\n");
    for needle in ["n_steps", "nowhere", "missing_op", "'y'"] {
        assert!(all.contains(needle), "no message about {needle}: {all}");
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let err = ScenarioSpec::from_toml("name = \"x\"\nbogus = 1\n").unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn csv_layout() {
    let t = Trajectory::explicit(
        "t",
        vec![
            Vector::new(&[0.0, 1.0]).unwrap(),
            Vector::new(&[0.5, -0.25]).unwrap(),
            Vector::new(&[1.0 / 3.0, 2.0]).unwrap(),
        ],
    )
    .unwrap();
    let csv = trajectory_csv(&t);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "n,x1,x2");
    assert!(lines[3].starts_with("2,"));
    let three = Trajectory::explicit("u", vec![Vector::zeros(3)]).unwrap();
    assert!(trajectory_csv(&three).starts_with("n,x1,x2,x3\n"));
}

#[test]
fn export_errors_carry_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let t = Trajectory::explicit("t", vec![Vector::zeros(1)]).unwrap();
    let err = export_trajectory(&t, &blocker.join("sub/t.csv")).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}

#[test]
fn report_json_has_the_documented_fields() {
    let run = run_scenario(&builtin("alternating-pair").unwrap()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("r.json");
    let report = run.report("fejer").unwrap();
    export_report(report, &path).unwrap();
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in ["checker", "verdict", "params", "seed", "metadata"] {
        assert!(j.get(key).is_some(), "missing {key}");
    }
    assert_eq!(j["verdict"]["type"], "pass");
    let n = run.trajectory("x").unwrap().len();
    assert_eq!(j["per_step"].as_array().unwrap().len(), n - 1);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL,
        prop::num::f64::SUBNORMAL,
        Just(0.0),
        -1e3..1e3f64,
    ]
}

proptest! {
    #[test]
    fn csv_round_trips_bit_for_bit(
        d in 1usize..=4,
        rows in prop::collection::vec(prop::collection::vec(finite(), 4), 1..20),
    ) {
        let points: Vec<Vector> = rows.iter().map(|r| Vector::new(&r[..d]).unwrap()).collect();
        let t = Trajectory::explicit("t", points.clone()).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("t.csv");
        export_trajectory(&t, &path).unwrap();
        let back = read_trajectory_csv(&path).unwrap();
        prop_assert_eq!(back.len(), points.len());
        for (a, b) in back.iter().zip(&points) {
            let bits = |v: &Vector| v.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(a), bits(b));
        }
    }
}
