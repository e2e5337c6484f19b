use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub summary: String,
    pub detail: serde_json::Value,
}

/// A discrepancy or noteworthy fact surfaced during a run. Findings do not
/// change the exit status on their own.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub code: String,
    pub message: String,
}

impl Finding {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Finding {
        Finding { code: code.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub id: String,
    pub version: u32,
    pub description: String,
    pub manifest_digest: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub findings: Vec<Finding>,
    /// 0 iff every check passed.
    pub status: i32,
}

pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn has_finding(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "id: {} (version {})", self.id, self.version);
        if !self.description.is_empty() {
            let _ = writeln!(out, "description: {}", self.description);
        }
        let _ = writeln!(out, "manifest_digest: {}", self.manifest_digest);
        let _ = writeln!(out, "seed: {}", self.seed);
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{verdict}] {}: {}", c.name, c.summary);
        }
        for f in &self.findings {
            let _ = writeln!(out, "finding {}: {}", f.code, f.message);
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }
}
