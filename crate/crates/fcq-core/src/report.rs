//! Structured pass/fail records for identity and centrality checks.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named verification with per-item results. Failures carry a witness
/// (the offending element, matrix or degree) serialized as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub items: Vec<CheckItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        VerificationReport {
            name: name.into(),
            items: Vec::new(),
        }
    }

    pub fn record(&mut self, name: impl Into<String>, pass: bool, witness: Option<Value>) {
        self.items.push(CheckItem {
            name: name.into(),
            pass,
            witness: if pass { None } else { witness },
        });
    }

    pub fn assert_true(&mut self, name: impl Into<String>, pass: bool) {
        self.record(name, pass, None);
    }

    /// True when every item passed.
    pub fn pass(&self) -> bool {
        self.items.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|c| !c.pass)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.name,
            if self.pass() { "PASS" } else { "FAIL" }
        )?;
        for item in &self.items {
            writeln!(
                f,
                "  [{}] {}",
                if item.pass { "pass" } else { "FAIL" },
                item.name
            )?;
        }
        Ok(())
    }
}
