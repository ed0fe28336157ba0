//! Report records and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct WitnessRecord {
    /// The substitution in `--at` syntax.
    pub at: String,
    pub value: String,
    pub replay: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ComponentRecord {
    pub multidegree: String,
    pub expression: String,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CheckRecord {
    pub check: String,
    pub claim_anchor: Option<String>,
    pub inputs: BTreeMap<String, String>,
    pub result: String,
    pub expected: Option<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<String>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, result: impl Into<String>) -> CheckRecord {
        CheckRecord {
            check: check.into(),
            claim_anchor: None,
            inputs: BTreeMap::new(),
            result: result.into(),
            expected: None,
            passed: true,
            witness: None,
            dimensions: None,
            bounds: None,
            components: Vec::new(),
            basis: None,
            certificate: None,
            notes: Vec::new(),
            millis: 0,
            replay: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn dimension(&mut self, key: &str, value: usize) {
        self.dimensions.get_or_insert_with(BTreeMap::new).insert(key.to_string(), value);
    }

    /// Records the expectation and whether the result meets it.
    pub fn expect(&mut self, expected: Option<&str>) {
        self.expected = expected.map(str::to_string);
        self.passed = expected.is_none_or(|e| e == self.result);
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Report {
    pub schema_version: u32,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(checks: Vec<CheckRecord>, warnings: Vec<String>) -> Report {
        let passed = checks.iter().filter(|c| c.passed).count();
        Report {
            schema_version: SCHEMA_VERSION,
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
            warnings,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn witness_lines(out: &mut String, indent: &str, w: &WitnessRecord) {
    let _ = writeln!(out, "{indent}witness: {}", w.at);
    let _ = writeln!(out, "{indent}value: {}", w.value);
    let _ = writeln!(out, "{indent}replay: {}", w.replay);
}

/// Full text of one record.
pub fn render_record(r: &CheckRecord, timings: bool) -> String {
    let mut out = String::new();
    let _ = write!(out, "{}: {}", r.check, r.result);
    if let Some(e) = &r.expected {
        let _ = write!(out, " (expected {e}{})", if r.passed { "" } else { ", FAILED" });
    }
    if timings {
        let _ = write!(out, " [{} ms]", r.millis);
    }
    out.push('\n');
    if let Some(a) = &r.claim_anchor {
        let _ = writeln!(out, "  anchor: {a}");
    }
    for (k, v) in &r.inputs {
        let _ = writeln!(out, "  {k}: {v}");
    }
    if let Some(d) = &r.dimensions {
        let dims: Vec<String> = d.iter().map(|(k, v)| format!("{k} {v}")).collect();
        let _ = writeln!(out, "  dimensions: {}", dims.join(", "));
    }
    if let Some(b) = &r.bounds {
        let _ = writeln!(out, "  bounds: {b}");
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    if let Some(w) = &r.witness {
        witness_lines(&mut out, "  ", w);
    }
    for c in &r.components {
        let _ = writeln!(out, "  component {}: {} ({})", c.multidegree, c.result, c.expression);
        if let Some(b) = &c.bounds {
            let _ = writeln!(out, "    bounds: {b}");
        }
        if let Some(w) = &c.witness {
            witness_lines(&mut out, "    ", w);
        }
    }
    if let Some(b) = &r.basis {
        let _ = writeln!(out, "  basis ({}):", b.len());
        for p in b {
            let _ = writeln!(out, "    {p}");
        }
    }
    if let Some(c) = &r.certificate {
        let _ = writeln!(out, "  certificate:");
        for t in c {
            let _ = writeln!(out, "    {t}");
        }
    }
    if let Some(r) = &r.replay {
        let _ = writeln!(out, "  replay: {r}");
    }
    out
}

/// One line per check, with details for failures only.
pub fn render_summary(report: &Report, timings: bool) -> String {
    let mut out = String::new();
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for r in &report.checks {
        if r.passed {
            let _ = write!(out, "PASS {} [{}] {}", r.check, r.claim_anchor.as_deref().unwrap_or("-"), r.result);
            if timings {
                let _ = write!(out, " ({} ms)", r.millis);
            }
            out.push('\n');
        } else {
            out.push_str("FAIL ");
            out.push_str(&render_record(r, timings));
        }
    }
    let s = &report.summary;
    let _ = writeln!(out, "{} checks, {} passed, {} failed", s.total, s.passed, s.failed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_sets_passed() {
        let mut r = CheckRecord::new("c", "identity");
        r.expect(None);
        assert!(r.passed);
        r.expect(Some("identity"));
        assert!(r.passed);
        r.expect(Some("non-identity"));
        assert!(!r.passed);
        let report = Report::new(vec![r, CheckRecord::new("d", "identity")], vec![]);
        assert_eq!(report.summary, Summary { total: 2, passed: 1, failed: 1 });
        assert!(!report.all_passed());
    }

    #[test]
    fn json_has_schema_fields_in_order() {
        let mut r = CheckRecord::new("cm", "identity");
        r.claim_anchor = Some("tinf".into());
        r.input("expression", "[x,y,[u,v],z]");
        r.expect(Some("identity"));
        let json = Report::new(vec![r], vec![]).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        let c = &v["checks"][0];
        for key in ["check", "claim_anchor", "inputs", "result", "expected", "millis"] {
            assert!(c.get(key).is_some(), "{key}");
        }
        assert!(c.get("witness").is_none());
        let order: Vec<usize> = ["\"check\"", "\"claim_anchor\"", "\"inputs\"", "\"result\"", "\"expected\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }
}
