//! Run manifests, named checks and the manifest diff.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// How a measured value is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `measured <= tolerance`
    AtMost,
    /// `measured >= tolerance`
    AtLeast,
    /// `|measured - target| <= tolerance`
    Near,
    /// `measured == target` for 0/1 flags
    Flag,
}

/// One named verdict. NaN measurements always fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: Option<f64>,
    pub tolerance: f64,
    pub rule: Rule,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), measured, target: None, tolerance: limit, rule: Rule::AtMost, passed: measured <= limit }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), measured, target: None, tolerance: limit, rule: Rule::AtLeast, passed: measured >= limit }
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self { name: name.into(), measured, target: Some(target), tolerance, rule: Rule::Near, passed }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), measured: f64::from(u8::from(ok)), target: Some(1.0), tolerance: 0.0, rule: Rule::Flag, passed: ok }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    /// Ran to completion, some check failed.
    Failed,
    /// Aborted by a numerical guard; the checks are those recorded before.
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub status: Status,
    pub error: Option<String>,
    /// Resolved config, defaults included.
    pub config: serde_json::Value,
    pub wall_clock_seconds: f64,
    pub workers: usize,
    pub checks: Vec<Check>,
    /// File names relative to the run directory.
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// One check whose measured value differs between two manifests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDiff {
    pub name: String,
    pub a: f64,
    pub b: f64,
    /// `|a - b| / max(|a|, |b|)`.
    pub relative: f64,
    /// `a / b`.
    pub ratio: f64,
    pub tolerance: f64,
    /// `|a - b|` exceeds the check's own tolerance, or the verdict flipped.
    pub drifted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffReport {
    pub experiment: String,
    pub differences: Vec<FieldDiff>,
    /// Checks present in only one manifest.
    pub unmatched: Vec<String>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.differences.is_empty() && self.unmatched.is_empty()
    }

    pub fn drifted(&self) -> bool {
        !self.unmatched.is_empty() || self.differences.iter().any(|d| d.drifted)
    }

    pub fn get(&self, name: &str) -> Option<&FieldDiff> {
        self.differences.iter().find(|d| d.name == name)
    }
}

/// Check-by-check comparison. Identical values produce no entry.
pub fn compare(a: &RunManifest, b: &RunManifest) -> Result<DiffReport, CliError> {
    if a.experiment != b.experiment {
        return Err(CliError::Config(format!("cannot compare a `{}` run with a `{}` run", a.experiment, b.experiment)));
    }
    let mut differences = Vec::new();
    let mut unmatched = Vec::new();
    for ca in &a.checks {
        let Some(cb) = b.check(&ca.name) else {
            unmatched.push(ca.name.clone());
            continue;
        };
        let (x, y) = (ca.measured, cb.measured);
        if x.to_bits() == y.to_bits() && ca.passed == cb.passed {
            continue;
        }
        let scale = x.abs().max(y.abs());
        let relative = if scale > 0.0 { (x - y).abs() / scale } else { 0.0 };
        let tolerance = ca.tolerance.max(cb.tolerance);
        differences.push(FieldDiff {
            name: ca.name.clone(),
            a: x,
            b: y,
            relative,
            ratio: x / y,
            tolerance,
            drifted: !((x - y).abs() <= tolerance) || ca.passed != cb.passed,
        });
    }
    unmatched.extend(b.checks.iter().filter(|c| a.check(&c.name).is_none()).map(|c| c.name.clone()));
    Ok(DiffReport { experiment: a.experiment.clone(), differences, unmatched })
}
