//! Uniform result type for the verification suites.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// A single failing case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub witness: Value,
    /// `value − bound` (positive means the inequality failed by that much).
    pub excess: f64,
}

/// One plot-ready summary line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub case: String,
    pub value: f64,
    pub bound: f64,
}

/// Outcome of one suite: how many cases were checked, which failed, and the
/// smallest margin `bound − value` seen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub range: Value,
    pub checked: u64,
    pub violations: Vec<Violation>,
    /// Minimum of `bound − value` over all cases (`+∞` renders as `null`).
    pub max_slack: Option<f64>,
    pub passed: bool,
    /// Cases skipped because a hypothesis did not apply, with the reason.
    pub inapplicable: Vec<String>,
    /// Values recorded for information only, never asserted.
    pub notes: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<SweepRow>,
}

/// Most violations kept in a report; the count in `checked` stays exact.
pub const MAX_WITNESSES: usize = 64;

impl VerificationReport {
    pub fn new(suite: &str, range: Value) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            range,
            checked: 0,
            violations: Vec::new(),
            max_slack: None,
            passed: true,
            inapplicable: Vec::new(),
            notes: Value::Null,
            rows: Vec::new(),
        }
    }

    /// Records one inequality `value ≤ bound` (up to `tol`).
    pub fn check(&mut self, value: f64, bound: f64, tol: f64, witness: impl FnOnce() -> Value) {
        self.record(bound - value, value <= bound + tol, witness);
    }

    /// Records an exactly decided case with its float slack for reporting.
    pub fn record(&mut self, slack: f64, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        self.max_slack = Some(match self.max_slack {
            Some(s) if s <= slack => s,
            _ => slack,
        });
        if !ok {
            self.passed = false;
            if self.violations.len() < MAX_WITNESSES {
                self.violations.push(Violation { witness: witness(), excess: -slack });
            }
        }
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        self.inapplicable.push(reason.into());
    }

    /// Folds another partial report for the same suite into this one.
    /// Associative; witness order is normalized by [`finish`](Self::finish).
    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.checked += other.checked;
        self.passed &= other.passed;
        self.max_slack = match (self.max_slack, other.max_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.violations.extend(other.violations);
        self.inapplicable.extend(other.inapplicable);
        self.rows.extend(other.rows);
        self
    }

    /// Sorts witnesses and rows so the report does not depend on merge order.
    pub fn finish(mut self) -> Self {
        self.violations
            .sort_by(|a, b| a.witness.to_string().cmp(&b.witness.to_string()).then(a.excess.total_cmp(&b.excess)));
        self.violations.truncate(MAX_WITNESSES);
        self.inapplicable.sort();
        self.rows.sort_by(|a, b| a.case.cmp(&b.case));
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// Sweep rows as CSV (`case,value,bound`); the violations when there are no rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["witness", "excess"]).map_err(|e| Error::Io(e.into()))?;
            for v in &self.violations {
                w.write_record([v.witness.to_string(), v.excess.to_string()])
                    .map_err(|e| Error::Io(e.into()))?;
            }
        } else {
            for r in &self.rows {
                w.serialize(r).map_err(|e| Error::Io(e.into()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn merge_is_order_independent() {
        let mk = |vals: &[(f64, f64)]| {
            let mut r = VerificationReport::new("s", json!(null));
            for &(v, b) in vals {
                r.check(v, b, 0.0, || json!({ "v": v }));
            }
            r
        };
        let a = mk(&[(1.0, 2.0), (3.0, 2.0)]);
        let b = mk(&[(0.5, 0.4), (0.0, 1.0)]);
        let ab = a.clone().merge(b.clone()).finish();
        let ba = b.merge(a).finish();
        assert_eq!(ab, ba);
        assert_eq!(ab.checked, 4);
        assert!(!ab.passed);
        assert_eq!(ab.violations.len(), 2);
        assert_eq!(ab.max_slack, Some(-1.0));
    }

    #[test]
    fn passed_iff_no_violations() {
        let mut r = VerificationReport::new("s", json!({}));
        r.check(1.0, 1.0, 0.0, || json!(0));
        assert!(r.passed && r.violations.is_empty());
        assert_eq!(r.max_slack, Some(0.0));
        assert!(r.to_csv().unwrap().starts_with("witness,excess"));
    }
}
