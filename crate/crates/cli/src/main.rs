use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hartree_cli::{compare, init_workers, load_config, manifest_path, run, CliError, RunManifest, Status};

/// Runs and compares hartree experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Run directory, overriding `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diff two manifests (or run directories) of the same experiment.
    Compare { a: PathBuf, b: PathBuf },
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    init_workers()?;
    match cli.command {
        Command::Run { config, out } => {
            let config = load_config(&config)?;
            let m = run(&config, out.as_deref())?;
            for c in &m.checks {
                println!("{} {:<32} {:.6e}", if c.passed { "pass" } else { "FAIL" }, c.name, c.measured);
            }
            if let Some(e) = &m.error {
                eprintln!("aborted: {e}");
            }
            Ok(m.status == Status::Passed)
        }
        Command::Compare { a, b } => {
            let (ma, mb) = (RunManifest::load(&manifest_path(&a))?, RunManifest::load(&manifest_path(&b))?);
            let report = compare(&ma, &mb)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(!report.drifted())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
