//! Command-line experiments.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 validation
//! failure, 3 numerical failure.

pub mod config;
pub mod experiments;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::sweep::Execution;
use crate::{Error, Result};
use config::{parse_list, parse_range, Experiment, Format, Overrides, RunConfig};
use output::Table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vqutrit",
    version,
    about = "Entanglement dynamics of V-type qutrits in a shared reservoir"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Negativity of the maximally entangled pair over a time grid.
    NegativityDynamics(CommonArgs),
    /// Bound-state energy over a gamma0 x N grid for each theta.
    BoundSpectrum(CommonArgs),
    /// Negativity at a fixed time over gamma0 x theta x N.
    NegativityMap(CommonArgs),
    /// Run the validation suites, or re-check a written table with --from.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, allow_negative_numbers = true)]
    gamma0: Option<f64>,
    /// `a:b:n` or a comma-separated list.
    #[arg(long)]
    gamma0_grid: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// `a:b:n` or a comma-separated list.
    #[arg(long)]
    theta_grid: Option<String>,
    #[arg(long)]
    n_atoms: Option<u32>,
    /// Comma-separated atom numbers, e.g. `1,3,6,9`.
    #[arg(long)]
    n_list: Option<String>,
    /// Single evaluation time.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// `a:b:n` or a comma-separated list.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluate grid points on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of discrete bath modes.
    #[arg(long)]
    modes: Option<usize>,
    /// Half bandwidth `W` of the discretized band.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Integration step of the oracle.
    #[arg(long)]
    dt: Option<f64>,
    /// Cut the band at zero frequency and run the trapping check.
    #[arg(long)]
    cutoff_at_zero: bool,
    /// Re-check the rows of a previously written table.
    #[arg(long)]
    from: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            gamma0: self.gamma0,
            gamma0_grid: self.gamma0_grid.as_deref().map(parse_range).transpose()?,
            lambda: self.lambda,
            theta: self.theta,
            theta_grid: self.theta_grid.as_deref().map(parse_range).transpose()?,
            n_atoms: self.n_atoms,
            n_list: self.n_list.as_deref().map(parse_list).transpose()?,
            t: self.t,
            t_grid: self.t_grid.as_deref().map(parse_range).transpose()?,
            output: self.output.clone(),
            format: self
                .format
                .as_deref()
                .map(str::parse::<Format>)
                .transpose()?,
            ..Overrides::default()
        })
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

/// What a successful invocation produced.
#[derive(Debug)]
pub enum Outcome {
    Table,
    Report(validate::Report),
}

/// Parses the process arguments, runs the experiment and maps the result
/// to an exit code.
pub fn run() -> ExitCode {
    ExitCode::from(run_from(std::env::args_os()))
}

/// Like [`run`], for an explicit argument list; returns the exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Outcome::Table) => EXIT_OK,
        Ok(Outcome::Report(report)) => {
            for c in &report.checks {
                eprintln!(
                    "{} {}: {:e} (bound {}) {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.bound,
                    c.detail
                );
            }
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn resolve(experiment: Experiment, common: &CommonArgs, flags: Overrides) -> Result<RunConfig> {
    let file = match &common.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    flags.or(file).apply(RunConfig::defaults(experiment))
}

fn execute(cli: Cli) -> Result<Outcome> {
    let (experiment, common, flags) = match &cli.command {
        Command::NegativityDynamics(c) => (Experiment::NegativityDynamics, c, c.overrides()?),
        Command::BoundSpectrum(c) => (Experiment::BoundSpectrum, c, c.overrides()?),
        Command::NegativityMap(c) => (Experiment::NegativityMap, c, c.overrides()?),
        Command::Validate(v) => {
            let flags = Overrides {
                modes: v.modes,
                bandwidth: v.bandwidth,
                dt: v.dt,
                cutoff_at_zero: v.cutoff_at_zero.then_some(true),
                from: v.from.clone(),
                ..v.common.overrides()?
            };
            (Experiment::Validate, &v.common, flags)
        }
    };
    let cfg = resolve(experiment, common, flags)?;
    let exec = common.execution();
    match experiment {
        Experiment::NegativityDynamics => {
            emit(&cfg, &experiments::negativity_dynamics(&cfg, exec)?)
        }
        Experiment::BoundSpectrum => emit(&cfg, &experiments::bound_spectrum(&cfg, exec)?),
        Experiment::NegativityMap => emit(&cfg, &experiments::negativity_map(&cfg, exec)?),
        Experiment::Validate => {
            let report = validate::validate(&cfg, exec)?;
            emit(&cfg, &report.to_table())?;
            return Ok(Outcome::Report(report));
        }
    }?;
    Ok(Outcome::Table)
}

/// Writes the table to the configured destination.
fn emit(cfg: &RunConfig, table: &Table) -> Result<()> {
    let echo = serde_json::to_value(cfg).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let text = table.render(cfg.format, &echo);
    let io_err = |path: &std::path::Path, e: std::io::Error| {
        Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
    };
    match cfg.output_path() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            }
            fs::write(&path, text).map_err(|e| io_err(&path, e))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}"))),
    }
}
