//! Machine-readable check reports shared by the CLI subcommands.

use crate::error::Result;
use serde::{Serialize, Serializer};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The run was too small to decide the check.
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive: noise floor",
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub lhs: f64,
    pub rhs: f64,
    /// The quantity compared against `tolerance`.
    pub error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// `|lhs - rhs| <= tol * max(|rhs|, 1e-300)` when `relative`, else `|lhs - rhs| <= tol`.
    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, relative: bool) -> Self {
        let diff = (lhs - rhs).abs();
        let error = if relative { diff / rhs.abs().max(1e-300) } else { diff };
        let status = if error <= tol { Status::Pass } else { Status::Fail };
        let detail = if relative { "relative error" } else { "absolute error" };
        Self { name: name.into(), status, lhs, rhs, error, tolerance: tol, detail: detail.into() }
    }

    /// `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let status = if value <= bound { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, lhs: value, rhs: bound, error: value, tolerance: bound, detail: "upper bound".into() }
    }

    /// Monte Carlo agreement within `k` standard errors. Runs with fewer than
    /// `min_samples` samples are reported inconclusive instead of judged.
    pub fn within_se(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        se: f64,
        k: f64,
        samples: usize,
        min_samples: usize,
    ) -> Self {
        let z = if se > 0.0 { (lhs - rhs).abs() / se } else if lhs == rhs { 0.0 } else { f64::INFINITY };
        let status = if samples < min_samples {
            Status::Inconclusive
        } else if z <= k {
            Status::Pass
        } else {
            Status::Fail
        };
        let detail = format!("standard error {se:.6e}, {samples} samples (minimum {min_samples})");
        Self { name: name.into(), status, lhs, rhs, error: z, tolerance: k, detail }
    }

    pub fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        let v = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), status, lhs: v, rhs: 1.0, error: 1.0 - v, tolerance: 0.0, detail: detail.into() }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// One subcommand run: config echo, seed, checks and results. Wall-clock time
/// lives in a separate sidecar so that reruns stay byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64, config: BTreeMap<String, Value>) -> Self {
        Self { command: command.into(), seed, config, checks: Vec::new(), results: Value::Null }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// No check failed. Inconclusive checks count as acceptable.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One line per check, for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<28} {:<50} error {:.3e} (tol {:.1e})\n",
                c.status.as_str(),
                c.name,
                c.error,
                c.tolerance
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub command: String,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

/// Format floats for CSV so that output depends only on the value.
pub fn csv_float(x: f64) -> String {
    format!("{x:.17e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses() {
        assert_eq!(Check::close("a", 1.0, 1.0 + 1e-13, 1e-12, true).status, Status::Pass);
        assert_eq!(Check::close("a", 1.0, 1.1, 1e-3, false).status, Status::Fail);
        assert_eq!(Check::within_se("b", 1.0, 1.2, 0.01, 3.0, 50, 1000).status, Status::Inconclusive);
        assert_eq!(Check::within_se("b", 1.0, 1.02, 0.01, 3.0, 5000, 1000).status, Status::Pass);
        let mut r = Report::new("x", 1, BTreeMap::new());
        r.push(Check::within_se("b", 1.0, 9.0, 0.01, 3.0, 1, 1000));
        assert!(r.ok());
        r.push(Check::flag("c", false, ""));
        assert!(!r.ok());
        let j = r.to_json().unwrap();
        assert!(j.contains("\"inconclusive: noise floor\""));
    }
}
