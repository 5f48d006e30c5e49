use serde::Serialize;

use super::ScenarioSpec;

const SOURCES: &[&str] = &[
    include_str!("../../scenarios/alternating-pair.toml"),
    include_str!("../../scenarios/harmonic-rotation.toml"),
    include_str!("../../scenarios/negation-r1.toml"),
    include_str!("../../scenarios/pazy-translation.toml"),
    include_str!("../../scenarios/scalar-averaged-sweep.toml"),
    include_str!("../../scenarios/affine-linear-limit.toml"),
    include_str!("../../scenarios/codim1-reflection.toml"),
    include_str!("../../scenarios/decoupling-demo.toml"),
    include_str!("../../scenarios/dr-two-balls-r3.toml"),
    include_str!("../../scenarios/open-problem-p1.toml"),
    include_str!("../../scenarios/open-problem-p2.toml"),
    include_str!("../../scenarios/open-problem-p3.toml"),
    include_str!("../../scenarios/open-problem-p4.toml"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub description: String,
    pub anchor: String,
}

/// All built-in scenarios, parsed and validated.
pub fn builtin_specs() -> Vec<ScenarioSpec> {
    SOURCES
        .iter()
        .map(|s| ScenarioSpec::from_toml(s).expect("built-in scenario files are valid"))
        .collect()
}

pub fn builtin(name: &str) -> Option<ScenarioSpec> {
    builtin_specs().into_iter().find(|s| s.name == name)
}

pub fn list_scenarios() -> Vec<ScenarioInfo> {
    builtin_specs()
        .into_iter()
        .map(|s| ScenarioInfo {
            name: s.name,
            description: s.description,
            anchor: s.anchor,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        let list = list_scenarios();
        assert!(list.len() >= 13);
        let mut names: Vec<_> = list.iter().map(|s| s.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), list.len());
        assert!(list.iter().all(|s| !s.anchor.is_empty() && !s.description.is_empty()));
    }

    #[test]
    fn built_ins_round_trip_through_toml() {
        for spec in builtin_specs() {
            let text = spec.to_toml().unwrap();
            assert_eq!(ScenarioSpec::from_toml(&text).unwrap(), spec, "{}", spec.name);
        }
    }
}
