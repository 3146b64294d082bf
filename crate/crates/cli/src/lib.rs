//! Config-driven experiment runner for `hartree-core`.
//!
//! A run reads one TOML document, executes the named experiment and leaves
//! a self-contained directory behind: `manifest.json` with the resolved
//! config and every check, `results.csv`, and any saved fields in the
//! binary format of [`field_io`].

pub mod config;
pub mod error;
pub mod experiments;
pub mod field_io;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{ExperimentKind, RunConfig};
pub use error::CliError;
pub use manifest::{compare, Check, DiffReport, RunManifest, Status};

use output::{write_atomic, Recorder};

/// Environment variable holding the worker-pool size.
pub const WORKERS_VAR: &str = "HARTREE_WORKERS";

pub const MANIFEST: &str = "manifest.json";
pub const TABLE: &str = "results.csv";

/// Sizes the global worker pool from [`WORKERS_VAR`], if set.
pub fn init_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_VAR} must be a positive integer, got `{raw}`")))?;
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RunConfig::parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Runs `config` and writes its directory (`out` overrides the configured
/// one). A numerical guard aborts the experiment but still produces a
/// manifest, with status [`Status::Aborted`].
pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunManifest, CliError> {
    let dir: PathBuf = out.map_or_else(|| config.output.clone(), Path::to_path_buf);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut echo = config.clone();
    echo.output = dir.clone();

    let start = Instant::now();
    let mut rec = Recorder::default();
    let outcome = experiments::dispatch(config, &mut rec);
    let wall = start.elapsed().as_secs_f64();

    let mut artifacts = Vec::new();
    if let Some(t) = &rec.table {
        write_atomic(&dir, TABLE, &t.to_csv())?;
        artifacts.push(TABLE.to_string());
    }
    for (name, bytes) in &rec.fields {
        write_atomic(&dir, name, bytes)?;
        artifacts.push(name.clone());
    }
    let (status, error) = match outcome {
        Err(e) => (Status::Aborted, Some(e.to_string())),
        Ok(()) if rec.checks.iter().all(|c| c.passed) => (Status::Passed, None),
        Ok(()) => (Status::Failed, None),
    };
    let manifest = RunManifest {
        experiment: config.experiment.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        status,
        error,
        config: serde_json::to_value(&echo).expect("config serializes"),
        wall_clock_seconds: wall,
        workers: rayon::current_num_threads(),
        checks: rec.checks,
        artifacts,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&dir, MANIFEST, text.as_bytes())?;
    Ok(manifest)
}

/// Resolves a manifest argument that may name a run directory.
pub fn manifest_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(MANIFEST)
    } else {
        p.to_path_buf()
    }
}
