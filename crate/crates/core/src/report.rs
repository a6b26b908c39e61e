//! One verification trial, self-describing and re-checkable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Default additive slack: `1e-9 (1 + rhs)`.
pub fn default_tolerance(rhs: f64) -> f64 {
    1e-9 * (1.0 + rhs.abs())
}

/// Where `constant_used` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    /// Product of explicit inequality factors along the proof of the estimate.
    ProofChain,
    /// A measured ratio stored with margin; no explicit constant is available.
    RegressionBaseline,
    /// The inequality holds with constant 1 (or another exact value).
    Exact,
    /// Identity check; lhs is a residual and rhs its scale.
    Residual,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub seed: Option<u64>,
    pub trial: Option<u64>,
    pub norm: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub theorem_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    /// `lhs / rhs`, before the constant is applied.
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub constant_source: ConstantSource,
    pub params: ReportParams,
    /// Auxiliary numbers (bootstrap slack, fitted orders, ...), sorted by key.
    pub extras: BTreeMap<String, f64>,
    /// False once a side condition (precondition, regime, slack) failed.
    #[serde(default = "yes")]
    pub checks_passed: bool,
    pub notes: String,
}

fn yes() -> bool {
    true
}

impl EstimateReport {
    /// Builds a report with the default tolerance and computes `ratio` and `pass`.
    pub fn new(
        theorem_id: &str,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        source: ConstantSource,
    ) -> Self {
        let mut r = Self {
            theorem_id: theorem_id.to_string(),
            lhs,
            rhs,
            constant_used,
            ratio: 0.0,
            tolerance: default_tolerance(rhs),
            pass: false,
            constant_source: source,
            params: ReportParams::default(),
            extras: BTreeMap::new(),
            checks_passed: true,
            notes: String::new(),
        };
        r.refresh();
        r
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.refresh();
        self
    }

    pub fn with_params(mut self, params: ReportParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: &str) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text);
        self
    }

    /// Record for a trial that stopped with an error; never passes on recheck.
    pub fn aborted(theorem_id: &str, error: &dyn std::fmt::Display) -> Self {
        Self::new(theorem_id, 1.0, 0.0, 0.0, ConstantSource::Residual)
            .with_tolerance(0.0)
            .fail(&format!("aborted: {error}"))
    }

    /// Forces failure regardless of the inequality, e.g. when a side check failed.
    pub fn fail(mut self, reason: &str) -> Self {
        self.checks_passed = false;
        self.pass = false;
        self.note(reason)
    }

    fn refresh(&mut self) {
        self.ratio = ratio(self.lhs, self.rhs);
        self.pass = self.recheck();
    }

    /// Recomputes `pass` from the stored numbers alone.
    pub fn recheck(&self) -> bool {
        self.checks_passed
            && self.lhs.is_finite()
            && self.rhs.is_finite()
            && self.lhs <= self.constant_used * self.rhs + self.tolerance
    }
}

/// `lhs / rhs` with `0/0 = 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_recomputable() {
        let r = EstimateReport::new("t", 1.0, 1.0, 1.5, ConstantSource::ProofChain);
        assert!(r.pass && r.recheck());
        assert_eq!(r.ratio, 1.0);
        let r = EstimateReport::new("t", 2.0, 1.0, 1.5, ConstantSource::ProofChain);
        assert!(!r.pass);
        let z = EstimateReport::new("t", 0.0, 0.0, 1.0, ConstantSource::Exact);
        assert!(z.pass && z.ratio == 0.0);
    }

    #[test]
    fn json_round_trip() {
        let r = EstimateReport::new("t", 0.25, 1.0, 1.5, ConstantSource::RegressionBaseline)
            .with_extra("slack", 0.1)
            .note("x");
        let s = serde_json::to_string(&r).unwrap();
        let back: EstimateReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
