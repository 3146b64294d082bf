//! Everything an experiment produces before it is written out.

use std::fs;
use std::path::Path;

use crate::error::CliError;
use crate::manifest::Check;

/// A numeric table, written as CSV with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Shortest round-trip formatting, so equal tables give equal bytes.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("writing to memory");
        }
        w.into_inner().expect("writing to memory")
    }
}

/// Collects checks, the result table and field dumps. Whatever was
/// recorded before a numerical guard fires still ends up on disk.
#[derive(Debug, Default)]
pub struct Recorder {
    pub checks: Vec<Check>,
    pub table: Option<Table>,
    pub fields: Vec<(String, Vec<u8>)>,
}

impl Recorder {
    pub fn check(&mut self, c: Check) {
        assert!(self.checks.iter().all(|d| d.name != c.name), "duplicate check `{}`", c.name);
        self.checks.push(c);
    }

    pub fn table(&mut self, t: Table) {
        self.table = Some(t);
    }

    pub fn field(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.fields.push((name.into(), bytes));
    }
}

/// Writes `name` inside `dir` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))
}
