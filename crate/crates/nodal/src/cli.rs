//! Argument parsing, dispatch and exit statuses.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use crate::error::{CliError, Result, EXIT_CONFIG};
use crate::exec::RayonExecutor;
use crate::manifest::read_replay_source;
use crate::params::Experiment;
use crate::run::{run, RunReport};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "NODAL_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "nodal", version, about = "Experiments on nodal sets of random real polynomials and Gaussian fields")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
    /// Master seed of all random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, default_value = "nodal-out")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    #[command(flatten)]
    Run(Experiment),
    /// Re-run the experiment recorded in a manifest.
    Replay {
        manifest: PathBuf,
        /// Compare the regenerated CSV files with those beside the manifest.
        #[arg(long)]
        verify: bool,
    },
}

/// Parses `args`, runs, reports, and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let record = json!({ "error": "config", "message": e.to_string().trim_end(), "exit_code": EXIT_CONFIG });
            eprintln!("{record}");
            return EXIT_CONFIG;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let names: Vec<String> = report.artifacts.iter().map(|p| p.display().to_string()).collect();
            println!("{}", json!({ "manifest": report.manifest.display().to_string(), "artifacts": names }));
            0
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.record()).unwrap_or_else(|_| e.to_string()));
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<RunReport> {
    let exec = RayonExecutor::new(cli.threads)?;
    match &cli.action {
        Action::Run(experiment) => run(experiment, cli.seed.unwrap_or(0), &cli.output_dir, &exec),
        Action::Replay { manifest, verify } => {
            if cli.seed.is_some() {
                return Err(CliError::config("replay takes its seed from the manifest"));
            }
            let (experiment, seed) = read_replay_source(manifest)?;
            let recorded = if *verify { recorded_tables(manifest)? } else { BTreeMap::new() };
            let report = run(&experiment, seed, &cli.output_dir, &exec)?;
            for (name, bytes) in &recorded {
                let path = cli.output_dir.join(name);
                let fresh = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
                if &fresh != bytes {
                    return Err(CliError::Mismatch(name.clone()));
                }
            }
            Ok(report)
        }
    }
}

/// CSV artifacts listed in a completed manifest, read from its directory.
fn recorded_tables(manifest: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let text = fs::read_to_string(manifest).map_err(|e| CliError::io(manifest, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let names = value["results"]["artifacts"]
        .as_array()
        .ok_or_else(|| CliError::config("manifest has no recorded artifacts to verify against"))?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let mut out = BTreeMap::new();
    for name in names.iter().filter_map(|n| n.as_str()).filter(|n| n.ends_with(".csv")) {
        let path = dir.join(name);
        out.insert(name.to_owned(), fs::read(&path).map_err(|e| CliError::io(&path, e))?);
    }
    Ok(out)
}
