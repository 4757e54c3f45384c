//! Command-line front end for the `roundsphere-core` checks.
//!
//! [`run`] executes one configured suite and writes the report; [`main_with_args`]
//! adds argument parsing and maps outcomes to exit codes: 0 when no record
//! failed, 1 when at least one did, 2 for configuration and I/O errors.

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use config::{parse_grid, parse_pairs, parse_raw, ConfigError, RawConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {msg}")]
    Output { path: PathBuf, msg: String },
}

#[derive(Debug, Parser)]
#[command(name = "roundsphere", version, about = "Numerical checks of Walter's formula, Gårding cones and sphere rigidity in space forms")]
pub struct Cli {
    /// symfun, cones, spaceform, walter, rigidity or all
    #[arg(long)]
    pub suite: Option<String>,
    /// sphere, ellipsoid, torus, cylinder or bump
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters, `k=v,k=v`
    #[arg(long)]
    pub params: Option<String>,
    /// Curvature of the ambient space form
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Order of the mean curvature H_r
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<i64>,
    /// Grid resolution per chart axis, e.g. `16,16`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random instances per randomized check
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<i64>,
    /// Tolerance overrides, `name=value,...`
    #[arg(long)]
    pub tol: Option<String>,
    /// Report path; the JSON goes to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json or json+csv
    #[arg(long)]
    pub format: Option<String>,
    /// JSON config file with the same keys; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    /// Merges the config file (if any) with the flags and validates.
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                parse_raw(&text)?
            }
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            suite: self.suite,
            family: self.family,
            params: self.params.as_deref().map(|p| parse_pairs("params", p)).transpose()?,
            c: self.c,
            r: self.r,
            grid: self.grid.as_deref().map(parse_grid).transpose()?,
            seed: self.seed,
            samples: self.samples,
            tol: self.tol.as_deref().map(|t| parse_pairs("tol", t)).transpose()?,
            out: self.out,
            format: self.format,
        };
        base.overlay(flags).finish()
    }
}

/// Outcome of a run.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: serde_json::Value,
}

fn create(path: &PathBuf) -> Result<(PathBuf, fs::File), RunError> {
    let f = fs::File::create(path).map_err(|e| RunError::Output { path: path.clone(), msg: e.to_string() })?;
    Ok((path.clone(), f))
}

fn write_all((path, mut f): (PathBuf, fs::File), bytes: &[u8]) -> Result<(), RunError> {
    f.write_all(bytes).map_err(|e| RunError::Output { path, msg: e.to_string() })
}

/// Runs the configured suite and writes the report files.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    // open the outputs first so that a bad path fails before any computation
    let json_file = cfg.out.as_ref().map(create).transpose()?;
    let csv_file = match (&cfg.out, cfg.format) {
        (Some(p), config::Format::JsonCsv) => Some(create(&report::csv_path(p))?),
        _ => None,
    };
    let out = suites::run_suite(cfg);
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let summary = report::summarize(&out.records);
    let doc = report::report_json(cfg, &out.records, out.rigidity.as_ref(), &out.caveats, timestamp);
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    match json_file {
        Some(file) => {
            write_all(file, text.as_bytes())?;
            if let Some(file) = csv_file {
                let mut buf = Vec::new();
                report::write_csv(&out.records, &mut buf).map_err(|e| RunError::Output { path: file.0.clone(), msg: e.to_string() })?;
                write_all(file, &buf)?;
            }
        }
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| RunError::Output { path: "<stdout>".into(), msg: e.to_string() })?;
        }
    }
    let exit_code = if summary.fail == 0 { EXIT_OK } else { EXIT_FAIL };
    Ok(RunOutcome { exit_code, report: doc })
}

/// Parses arguments, runs, prints a one-line summary to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            let s = &outcome.report["summary"];
            eprintln!("suite {}: {} pass, {} fail, {} skipped", cfg.suite, s["pass"], s["fail"], s["skipped"]);
            if let Some(v) = outcome.report.get("rigidity").and_then(|r| r.get("verdict")) {
                eprintln!("rigidity verdict: {}", v.as_str().unwrap_or("?"));
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
