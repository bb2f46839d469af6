//! Residual bookkeeping shared by every verifier.

use serde::{Deserialize, Serialize};

/// Outcome of one named identity checked over sampled points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Point where the largest residual occurred.
    pub worst_point: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Accumulates a residual stream for one named check.
#[derive(Debug, Clone)]
pub struct ResidualStat {
    name: String,
    tol: f64,
    count: usize,
    sum: f64,
    max: f64,
    worst_point: Vec<f64>,
    notes: Vec<String>,
}

impl ResidualStat {
    pub fn new(name: impl Into<String>, tol: f64) -> ResidualStat {
        ResidualStat {
            name: name.into(),
            tol,
            count: 0,
            sum: 0.0,
            max: 0.0,
            worst_point: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn record(&mut self, point: &[f64], residual: f64) {
        self.count += 1;
        self.sum += residual;
        if residual >= self.max {
            self.max = residual;
            self.worst_point = point.to_vec();
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            pass: self.max <= self.tol,
            name: self.name,
            samples: self.count,
            max_residual: self.max,
            mean_residual: if self.count == 0 {
                0.0
            } else {
                self.sum / self.count as f64
            },
            worst_point: self.worst_point,
            tol: self.tol,
            notes: self.notes,
        }
    }

    /// Finish with an explicit verdict, for checks whose pass condition is
    /// not `max <= tol` (e.g. sensitivity checks that must see a residual).
    pub fn finish_with(self, pass: bool) -> CheckResult {
        let mut r = self.finish();
        r.pass = pass;
        r
    }
}

/// Per-check residual statistics with an overall verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckResult>) -> VerificationReport {
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport { checks, pass }
    }

    pub fn merge(reports: Vec<VerificationReport>) -> VerificationReport {
        let checks = reports.into_iter().flat_map(|r| r.checks).collect();
        VerificationReport::new(checks)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest residual among checks whose name starts with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }
}
