use serde::{Deserialize, Serialize};

use crate::dual::DualScalar;
use crate::vector::DualVec3;

/// Outcome of one residual check. Passes only when both the real and the
/// dual residual maxima are below `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual_re: f64,
    pub max_residual_du: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(name: &str, re: f64, du: f64, tolerance: f64, samples: usize) -> Self {
        CheckResult {
            name: name.to_string(),
            max_residual_re: re,
            max_residual_du: du,
            tolerance,
            pass: re < tolerance && du < tolerance && samples > 0,
            samples,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Running maxima of absolute residuals, real and dual part kept apart.
#[derive(Debug, Clone, Copy, Default)]
pub struct Residuals {
    pub re: f64,
    pub du: f64,
    pub samples: usize,
    nan: bool,
}

impl Residuals {
    pub fn push(&mut self, r: DualScalar) {
        self.push_parts(r.re.abs(), r.du.abs());
    }

    pub fn push_vec(&mut self, v: &DualVec3) {
        let (re, du) = v.part_norms();
        self.push_parts(re, du);
    }

    pub fn push_parts(&mut self, re: f64, du: f64) {
        self.nan |= re.is_nan() || du.is_nan();
        self.re = self.re.max(re);
        self.du = self.du.max(du);
        self.samples += 1;
    }

    pub fn check(&self, name: &str, tolerance: f64) -> CheckResult {
        if self.nan {
            return CheckResult::new(name, f64::NAN, f64::NAN, tolerance, self.samples)
                .with_note("non-finite residual");
        }
        CheckResult::new(name, self.re, self.du, tolerance, self.samples)
    }
}

/// A scalar finding that is not a residual, e.g. a non-constancy measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Whether the expected relation between `value` and `threshold` holds.
    pub holds: bool,
    pub note: String,
}

/// Results of a set of checks. `checks` decide [`pass`](Self::pass);
/// `diagnostics` record alternative forms for comparison only.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TheoremReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<serde_json::Value>,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<Finding>,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<&CheckResult> {
        self.diagnostics.iter().find(|c| c.name == name)
    }

    pub fn finding(&self, name: &str) -> Option<&Finding> {
        self.findings.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: TheoremReport) {
        self.checks.extend(other.checks);
        self.diagnostics.extend(other.diagnostics);
        self.findings.extend(other.findings);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        let mut r = Residuals::default();
        r.push(DualScalar::new(f64::NAN, 0.0));
        r.push(DualScalar::new(0.0, 0.0));
        assert!(!r.check("x", 1.0).pass);
    }

    #[test]
    fn both_parts_must_pass() {
        assert!(!CheckResult::new("x", 0.0, 2.0, 1.0, 3).pass);
        assert!(CheckResult::new("x", 0.5, 0.5, 1.0, 3).pass);
        assert!(!CheckResult::new("x", 0.0, 0.0, 1.0, 0).pass);
    }

    #[test]
    fn json_shape() {
        let report = TheoremReport {
            checks: vec![CheckResult::new("thm4_torsion", 1e-9, 2e-9, 1e-6, 10)],
            ..Default::default()
        };
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let c = &v["checks"][0];
        assert_eq!(c["name"], "thm4_torsion");
        assert_eq!(c["pass"], true);
        assert_eq!(c["samples"], 10);
        assert!(c.get("max_residual_re").is_some() && c.get("tolerance").is_some());
    }
}
