use serde::Serialize;

use crate::error::Result;
use crate::regression::{log_log_fit, PowerFit};

/// One dyadic triple with both sides of an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DyadicRecord {
    pub mu: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Left side including the extrapolated time tail.
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or 0 when `rhs = 0`.
    pub ratio: f64,
    /// Left side over the finite window only.
    pub lhs_window: f64,
    /// Share of `lhs^2` contributed by the tail extrapolation.
    pub tail_share: f64,
    pub window: f64,
    pub steps: usize,
}

impl DyadicRecord {
    pub fn new(mu: f64, lambda1: f64, lambda2: f64, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        Self { mu, lambda1, lambda2, lhs, rhs, ratio, lhs_window: lhs, tail_share: 0.0, window: 0.0, steps: 0 }
    }
}

/// Description of how a report was produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub estimate: String,
    pub alpha: f64,
    pub n_points: usize,
    pub r_max: f64,
    pub bump: String,
    pub profile: String,
    /// Which flows enter the product, e.g. `S(t)f * S(-t)g`.
    pub flows: String,
}

/// Measured sides of an estimate over a set of dyadic triples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicReport {
    pub meta: ReportMeta,
    pub records: Vec<DyadicRecord>,
}

impl DyadicReport {
    pub fn new(meta: ReportMeta) -> Self {
        Self { meta, records: Vec::new() }
    }

    pub fn push(&mut self, record: DyadicRecord) {
        self.records.push(record);
    }

    pub fn sup_ratio(&self) -> f64 {
        self.records.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn inf_ratio(&self) -> f64 {
        self.records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }

    /// Log-log fit of `value` against `key` over all records.
    pub fn fit(&self, key: impl Fn(&DyadicRecord) -> f64, value: impl Fn(&DyadicRecord) -> f64) -> Result<PowerFit> {
        let xs: Vec<f64> = self.records.iter().map(&key).collect();
        let ys: Vec<f64> = self.records.iter().map(&value).collect();
        log_log_fit(&xs, &ys)
    }
}
