//! Command-line surface of `gbe-spectral`.
//!
//! Every subcommand returns a [`CommandOutput`]: a primary document (JSON or
//! CSV), optional sidecars and a [`RunManifest`]. [`emit`] writes them either
//! into an output directory or to stdout/stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod manifest;
pub mod output;

pub use manifest::RunManifest;
pub use output::{emit, Artifact, CommandOutput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(gbe_spectral::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<gbe_spectral::Error> for CliError {
    fn from(e: gbe_spectral::Error) -> Self {
        match e {
            gbe_spectral::Error::InvalidParameter { .. } | gbe_spectral::Error::BudgetExceeded { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gbe-spectral", version, about = "Mean spectral measure of the beta-ensemble limit Jacobi matrix")]
pub struct Cli {
    /// Worker threads for Monte Carlo; never changes output bytes.
    #[arg(long, global = true, env = "GBE_SPECTRAL_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Even moments u_0..u_n and optional identity checks.
    Moments(MomentsArgs),
    /// Density on a symmetric grid with normalization diagnostics.
    Density(DensityArgs),
    /// Exact identity report over p and beta_hat.
    Verify(VerifyArgs),
    /// Monte Carlo moments and spectral histogram of truncated random matrices.
    Sample(SampleArgs),
    /// Rescaled densities against the semicircle law.
    Semicircle(SemicircleArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Directory for output files; stdout/stderr when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Nonnegative number or rational `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long = "n", default_value_t = 10)]
    pub n: usize,
    /// Also run the Dyck, duality and u/h checks.
    #[arg(long)]
    pub checks: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Kummer,
    Quadrature,
    Auto,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 6.0)]
    pub ymax: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub pmax: usize,
    /// Comma-separated rationals.
    #[arg(long = "beta-hat", default_value = "1/2,1,2,3/7")]
    pub beta_hat: String,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 200)]
    pub trunc: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    /// Histogram bins; 0 disables the histogram.
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    #[arg(long, default_value_t = 6.0)]
    pub ymax: f64,
    /// Master seed; generated and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Document written to stdout without `--out`.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SemicircleArgs {
    /// Comma-separated positive values.
    #[arg(long, default_value = "4,16,64")]
    pub alpha: String,
    #[arg(long, default_value_t = 2.5)]
    pub xmax: f64,
    #[arg(long, default_value_t = 501)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutArg,
}

impl Command {
    pub fn out_dir(&self) -> Option<&std::path::Path> {
        match self {
            Command::Moments(a) => a.out.out.as_deref(),
            Command::Density(a) => a.out.out.as_deref(),
            Command::Verify(a) => a.out.out.as_deref(),
            Command::Sample(a) => a.out.out.as_deref(),
            Command::Semicircle(a) => a.out.out.as_deref(),
        }
    }
}

/// Runs the parsed command without touching stdout or the filesystem.
pub fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    if cli.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    match &cli.command {
        Command::Moments(a) => commands::moments(a),
        Command::Density(a) => commands::density(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sample(a) => commands::sample(a, cli.threads),
        Command::Semicircle(a) => commands::semicircle(a),
    }
}

/// Parses, runs and emits; returns the process exit code.
pub fn main_with(
    args: impl IntoIterator<Item = std::ffi::OsString>,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = run(&cli).and_then(|out| {
        let passed = out.passed;
        emit(out, cli.command.out_dir(), stdout, stderr)?;
        Ok(passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
