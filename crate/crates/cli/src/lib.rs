//! `csl-cutoff` command-line front end.
//!
//! [`run`] parses the arguments, executes one command and maps the outcome to
//! an exit code: 0 on success, 1 for usage or configuration errors, 2 for
//! solver failures, 3 when Monte-Carlo verification fails.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
pub mod config;
pub mod table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Model(#[from] csl_cutoff::Error),
    #[error("refusing to write invalid value: {0}")]
    InvalidOutput(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Model(csl_cutoff::Error::InvalidParameter { .. }) => 1,
            CliError::Model(_) | CliError::InvalidOutput(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "csl-cutoff", version, about = "Collapse times and cutoff bounds for colored-noise CSL")]
pub struct Cli {
    /// TOML config file; defaults to $CSL_CUTOFF_CONFIG when set.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the command's table or CSV here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Λ(t) for each cutoff kind and ω_M, with the white-noise line t/2.
    LambdaCurve(LambdaCurveArgs),
    /// Collapse time of a scenario's battery current.
    CollapseTime(CollapseTimeArgs),
    /// Smallest cutoff that still collapses by t_M, and the t_C(ω_M) curves.
    CutoffBound(CutoffBoundArgs),
    /// Cutoff needed for the I or J measure to drop to its threshold by t_M.
    FluctBound(FluctBoundArgs),
    /// Joule heating of the copper wire and the collapse rate it causes.
    Heating(HeatingArgs),
    /// Ions displaced in the battery, N = I h / v.
    Ions(IonsArgs),
    /// Monte-Carlo checks of the analytic Λ and Ĩ.
    McVerify(McVerifyArgs),
    /// Every published figure next to its computed value.
    Report,
}

#[derive(Debug, Args)]
pub struct LambdaCurveArgs {
    /// Comma-separated cutoff kinds.
    #[arg(long, value_delimiter = ',')]
    pub cutoff: Vec<String>,
    /// ω_M values [1/s], as a grid.
    #[arg(long)]
    pub omega_m: Option<String>,
    /// Times [s]: `log:lo:hi:n` or a comma-separated list.
    #[arg(long)]
    pub t_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct CollapseTimeArgs {
    #[arg(long)]
    pub preset: Option<String>,
    /// Electric current [A], overriding the preset.
    #[arg(long)]
    pub current: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long)]
    pub omega_m: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CutoffBoundArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub current: Option<f64>,
    /// Measurement times [s], as a grid.
    #[arg(long)]
    pub t_m: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
    /// ω_M grid [1/s] for the t_C curves.
    #[arg(long)]
    pub omega_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct FluctBoundArgs {
    /// I or J; both when omitted.
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long)]
    pub t_m: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub omega_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct HeatingArgs {
    /// Current through the wire [A].
    #[arg(long)]
    pub current: Option<f64>,
    /// Heating time [s].
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long)]
    pub omega_m: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IonsArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub current: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McVerifyArgs {
    /// Trajectories per cell.
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write one Lorentzian trajectory as `index,time,value` CSV.
    #[arg(long)]
    pub dump_trajectory: Option<PathBuf>,
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match commands::execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
