//! The `groupbuy` command-line tool: optimize, simulate, sweep and validate
//! over a flat TOML configuration.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use groupbuy_core::Error as CoreError;

pub use config::{Overrides, RawConfig, RunConfig};

/// Failures that end a command. Each maps to a stable exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::Io(_) => exit::FAILURE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { field, reason } => {
                CliError::Config(format!("{}: {reason}", config::config_key(field)))
            }
            CoreError::Config(m) => CliError::Config(m),
            numeric => CliError::Numeric(numeric.to_string()),
        }
    }
}

pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// Validation found failing checks.
    pub const FAILURE: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const PARTIAL_GRID: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "groupbuy", version, about = "Replenishment planning for group-buying auctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Auction statistics, Q* and the cost breakdown at the optimum.
    Optimize(Invocation),
    /// Monte Carlo run at `quantity`, compared against the analytic model.
    Simulate(Invocation),
    /// Evaluate a grid over n_values × t_values × lambda_values.
    Sweep(Invocation),
    /// Reference checks plus simulation cross-checks for the configuration.
    Validate(Invocation),
}

#[derive(Debug, Args)]
pub struct Invocation {
    /// TOML configuration file. Flags override its keys.
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    /// simulate: also write one JSON line per auction round of replication 0.
    #[arg(long = "event-log", value_name = "FILE")]
    pub event_log: Option<PathBuf>,
}

/// A finished command: the report body, an optional note for standard error
/// and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub notice: Option<String>,
    pub exit_code: u8,
}

pub fn run(command: Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let load = |inv: &Invocation| RunConfig::load(inv.config.as_deref(), inv.overrides.clone());
    let (outcome, cfg) = match &command {
        Command::Optimize(i) => {
            let cfg = load(i)?;
            (commands::optimize(&cfg)?, cfg)
        }
        Command::Simulate(i) => {
            let cfg = load(i)?;
            (commands::simulate(&cfg, i.event_log.as_deref())?, cfg)
        }
        Command::Sweep(i) => {
            let cfg = load(i)?;
            (commands::sweep(&cfg)?, cfg)
        }
        Command::Validate(i) => {
            let cfg = load(i)?;
            (commands::validate(&cfg)?, cfg)
        }
    };
    Ok((outcome, cfg.path))
}

/// Parses `args`, runs the command and writes the report to `out` (or to
/// the configured path). Returns the process exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return u8::try_from(code).unwrap_or(exit::CONFIG);
        }
    };
    match run(cli.command) {
        Ok((outcome, path)) => {
            if let Some(note) = &outcome.notice {
                let _ = writeln!(err, "{note}");
            }
            let written = match path {
                Some(p) => std::fs::write(&p, &outcome.report)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
                None => out.write_all(outcome.report.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
            };
            match written {
                Ok(()) => outcome.exit_code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
