//! Batch experiment runner behind the `bargmann` binary.
//!
//! Exit status: 0 on success, 1 on other failures, 2 for unreadable configs
//! and usage errors, 3 when a Fock sector exceeds the capacity cap
//! (`BARGMANN_SECTOR_CAP`), 4 when validation against the classical
//! reference fails.

pub mod config;
mod run;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;
pub use config::ExperimentConfig;
pub use run::{execute, Comparison, Outcome, EXACT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bargmann", version, about = "Multivariate trace estimation by Fourier interferometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Run(Common),
    /// Run an experiment for each value of one axis and tabulate the errors.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `shots`, `epsilon`, or the name of a `"$name"` placeholder.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Run one experiment and fail unless it matches the classical reference.
    Validate(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (JSON).
    pub config: PathBuf,
    /// Seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path override.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Validation tolerance override.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Written next to each result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds.
    pub wall_time: f64,
    #[serde(rename = "N")]
    pub shots: Option<u64>,
}

/// Error from a CLI action, with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            status: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            status: EXIT_FAILURE,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            Error::InvalidArgument(_)
            | Error::InvalidState(_)
            | Error::LayoutMismatch(_)
            | Error::DimensionMismatch { .. }
            | Error::Truncation { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

/// Parse arguments, run, and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Run(c) => run_command(c, false),
        Command::Validate(c) => run_command(c, true),
        Command::Sweep { common, axis, values } => sweep_command(common, axis, values),
    };
    match result {
        Ok(status) => status,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.status
        }
    }
}

fn read_config(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_config(doc: &Value) -> Result<ExperimentConfig, Failure> {
    serde_json::from_value(doc.clone()).map_err(|e| Failure::usage(format!("invalid config: {e}")))
}

fn config_hash(doc: &Value) -> String {
    let bytes = serde_json::to_vec(doc).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// `out.json` → `out.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("results serialize");
    s.push('\n');
    s
}

fn run_command(c: &Common, force_validate: bool) -> Result<i32, Failure> {
    let start = Instant::now();
    let doc = read_config(&c.config)?;
    let cfg = parse_config(&doc)?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let mode = cfg.mode.resolve(seed)?;
    let validate = force_validate || cfg.validate;
    let outcome = execute(&cfg.experiment, mode, c.tolerance.or(cfg.tolerance))?;

    let mut result = serde_json::json!({
        "experiment": cfg.experiment.name(),
        "seed": seed,
        "result": outcome.result,
    });
    if validate {
        result["validation"] = serde_json::to_value(&outcome.comparison).expect("comparison serializes");
    }
    let manifest = Manifest {
        config_hash: config_hash(&doc),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time: start.elapsed().as_secs_f64(),
        shots: match mode {
            crate::protocol::Mode::Sampled(p) => Some(p.shots),
            crate::protocol::Mode::Exact => None,
        },
    };

    let out = c.out.clone().or(cfg.output.as_ref().map(PathBuf::from));
    match &out {
        Some(path) => {
            write(path, &pretty(&result))?;
            write(&sibling(path, "manifest.json"), &pretty(&manifest))?;
            if validate {
                write(&sibling(path, "validation.json"), &pretty(&outcome.comparison))?;
            }
            if let Some(csv) = &outcome.csv {
                write(&sibling(path, "csv"), csv)?;
            }
        }
        None => {
            print!("{}", pretty(&result));
            eprint!("{}", pretty(&manifest));
        }
    }

    if validate && !outcome.comparison.passed {
        eprintln!(
            "validation failed: |protocol − oracle| = {:.3e} exceeds {:.3e}",
            outcome.comparison.abs_error, outcome.comparison.tolerance
        );
        return Ok(EXIT_VALIDATION);
    }
    Ok(EXIT_OK)
}

fn parse_values(values: &str) -> Result<Vec<f64>, Failure> {
    let parsed: Vec<f64> = values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::usage(format!("bad axis value `{s}`"))))
        .collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Err(Failure::usage("sweep axis has no values"));
    }
    Ok(parsed)
}

fn sweep_point(doc: &Value, axis: &str, value: f64, seed: Option<u64>, tolerance: Option<f64>) -> Result<Comparison, Failure> {
    let mut doc = doc.clone();
    if config::substitute(&mut doc, axis, value) == 0 {
        if axis == "shots" || axis == "epsilon" {
            config::set_budget(&mut doc, axis, value)?;
        } else {
            return Err(Failure::usage(format!("config has no `${axis}` placeholder")));
        }
    }
    let cfg = parse_config(&doc)?;
    let mode = cfg.mode.resolve(seed.or(cfg.seed).unwrap_or(0))?;
    Ok(execute(&cfg.experiment, mode, tolerance.or(cfg.tolerance))?.comparison)
}

fn sweep_command(c: &Common, axis: &str, values: &str) -> Result<i32, Failure> {
    let start = Instant::now();
    let values = parse_values(values)?;
    let doc = read_config(&c.config)?;
    let results: Vec<Result<Comparison, Failure>> = values
        .par_iter()
        .map(|&v| sweep_point(&doc, axis, v, c.seed, c.tolerance))
        .collect();

    let mut csv = format!("{axis},estimate_re,estimate_im,oracle_re,oracle_im,abs_error\n");
    let mut first_failure = None;
    for (v, r) in values.iter().zip(results) {
        match r {
            Ok(cmp) => csv.push_str(&format!(
                "{v},{},{},{},{},{}\n",
                cmp.protocol_value[0], cmp.protocol_value[1], cmp.oracle_value[0], cmp.oracle_value[1], cmp.abs_error
            )),
            Err(f) => {
                eprintln!("error at {axis} = {v}: {}", f.message);
                first_failure.get_or_insert(f);
            }
        }
    }

    let out = c.out.clone().or(parse_config(&doc).ok().and_then(|cfg| cfg.output.map(PathBuf::from)));
    let seed = c.seed.or(doc.get("seed").and_then(Value::as_u64)).unwrap_or(0);
    match &out {
        Some(path) => {
            write(path, &csv)?;
            let manifest = Manifest {
                config_hash: config_hash(&doc),
                seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                wall_time: start.elapsed().as_secs_f64(),
                shots: None,
            };
            write(&sibling(path, "manifest.json"), &pretty(&manifest))?;
        }
        None => print!("{csv}"),
    }
    match first_failure {
        Some(f) => Err(f),
        None => Ok(EXIT_OK),
    }
}
