use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::vector::Vector;

/// Concrete evidence attached to a failed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub step: Option<usize>,
    pub point: Option<Vector>,
    /// Name of the violated quantity.
    pub quantity: String,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn fail(step: Option<usize>, point: Option<Vector>, quantity: impl Into<String>, magnitude: f64) -> Self {
        Verdict::Fail {
            witness: Witness {
                step,
                point,
                quantity: quantity.into(),
                magnitude,
            },
        }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict::Inconclusive {
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Pass => VerdictKind::Pass,
            Verdict::Fail { .. } => VerdictKind::Fail,
            Verdict::Inconclusive { .. } => VerdictKind::Inconclusive,
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

/// Verdict without payload; used for expectations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Pass,
    Fail,
    Inconclusive,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::Pass => "pass",
            VerdictKind::Fail => "fail",
            VerdictKind::Inconclusive => "inconclusive",
        }
    }
}

/// Result of one checker run. Serializes to the report JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub checker: String,
    pub verdict: Verdict,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_step: Option<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
}

impl DiagnosticsReport {
    pub fn new(checker: impl Into<String>, verdict: Verdict) -> Self {
        DiagnosticsReport {
            checker: checker.into(),
            verdict,
            params: BTreeMap::new(),
            seed: None,
            per_step: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_per_step(mut self, data: Vec<f64>) -> Self {
        self.per_step = Some(data);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        self.metadata.insert(key.to_owned(), to_value(value));
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_json_shape() {
        let pass = serde_json::to_value(Verdict::Pass).unwrap();
        assert_eq!(pass, serde_json::json!({"type": "pass"}));
        let fail = Verdict::fail(Some(3), None, "distance increase", 0.5);
        let j = serde_json::to_value(&fail).unwrap();
        assert_eq!(j["type"], "fail");
        assert_eq!(j["witness"]["step"], 3);
        let inc = serde_json::to_value(Verdict::inconclusive("why")).unwrap();
        assert_eq!(inc, serde_json::json!({"type": "inconclusive", "reason": "why"}));
    }

    #[test]
    fn report_keys_are_sorted() {
        let r = DiagnosticsReport::new("x", Verdict::Pass)
            .param("zeta", 1)
            .param("alpha", 2)
            .with_seed(5);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.contains("\"seed\":5"));
    }
}
