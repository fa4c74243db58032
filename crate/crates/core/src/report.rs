//! Pass/fail tallies for sampled property checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub pass: u64,
    pub fail: u64,
    pub counterexample: Option<String>,
}

/// Property name to tally. Serializes as `{property: {pass, fail, counterexample}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CheckReport {
    pub properties: BTreeMap<String, PropertyTally>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one outcome. Only the first counterexample is kept.
    pub fn record(&mut self, property: &str, ok: bool, witness: impl FnOnce() -> String) {
        let tally = self.properties.entry(property.to_string()).or_default();
        if ok {
            tally.pass += 1;
        } else {
            tally.fail += 1;
            if tally.counterexample.is_none() {
                tally.counterexample = Some(witness());
            }
        }
    }

    /// Makes sure `property` appears even if nothing was recorded for it.
    pub fn touch(&mut self, property: &str) {
        self.properties.entry(property.to_string()).or_default();
    }

    pub fn all_pass(&self) -> bool {
        self.properties.values().all(|t| t.fail == 0)
    }

    pub fn failed(&self, property: &str) -> bool {
        self.properties.get(property).is_some_and(|t| t.fail > 0)
    }

    pub fn get(&self, property: &str) -> Option<&PropertyTally> {
        self.properties.get(property)
    }

    pub fn merge(&mut self, prefix: &str, other: CheckReport) {
        for (name, tally) in other.properties {
            let key = if prefix.is_empty() {
                name
            } else {
                format!("{prefix}.{name}")
            };
            let slot = self.properties.entry(key).or_default();
            slot.pass += tally.pass;
            slot.fail += tally.fail;
            if slot.counterexample.is_none() {
                slot.counterexample = tally.counterexample;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in &self.properties {
            write!(f, "{name}: {} pass, {} fail", t.pass, t.fail)?;
            if let Some(cx) = &t.counterexample {
                write!(f, " (counterexample: {cx})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_first_counterexample() {
        let mut r = CheckReport::new();
        r.record("p", true, String::new);
        r.record("p", false, || "first".into());
        r.record("p", false, || "second".into());
        let t = r.get("p").unwrap();
        assert_eq!((t.pass, t.fail), (1, 2));
        assert_eq!(t.counterexample.as_deref(), Some("first"));
        assert!(!r.all_pass());
    }

    #[test]
    fn json_shape() {
        let mut r = CheckReport::new();
        r.record("modularity", true, String::new);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["modularity"]["pass"], 1);
        assert_eq!(v["modularity"]["fail"], 0);
        assert!(v["modularity"]["counterexample"].is_null());
    }
}
