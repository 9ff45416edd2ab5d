//! `xychain`: dataset generation for weakly end-coupled XY spin chains.
//!
//! Six subcommands reproduce the library's headline analyses as
//! self-describing CSV (or JSON) datasets: `sweep`, `surface`, `gap`,
//! `anisotropy`, `thermal` and `oracle-check`. Parameters come from
//! command-line flags, optionally backed by a flat key=value config file;
//! flags win. Exit codes: 0 success, 1 validation error, 2 runtime
//! failure.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Runtime(msg) => write!(f, "run failed: {msg}"),
        }
    }
}

impl From<xychain::Error> for CliError {
    fn from(e: xychain::Error) -> Self {
        use xychain::Error::*;
        // Errors caused by the requested parameters are validation errors;
        // failures inside a run (degenerate instances, non-convergence) are
        // runtime failures. Sweep failures carry the offending grid point.
        match &e {
            InvalidChain(_) | SiteRange { .. } | InvalidGrid(_) | GridTooCoarse { .. }
            | InvalidTemperature(_) | OracleTooLarge { .. } => CliError::Validation(e.to_string()),
            SweepPoint { .. } | SvdConvergence | SingularQuadraticForm | ClosedChain
            | InconsistentCorrelators { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "xychain",
    version,
    about = "Long-range correlation and freezing datasets for weakly end-coupled XY spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discord, entanglement and correlators along a lambda1 sweep (one curve per lambda2)
    Sweep(SweepArgs),
    /// Discord, concurrence and gap on the lambda1 x lambda2 grid
    Surface(SurfaceArgs),
    /// Energy gap along lambda1 for several chain sizes and lambda2 values
    Gap(GapArgs),
    /// Order parameter lambda2 - l_f and frozen discord versus bulk anisotropy
    Anisotropy(AnisotropyArgs),
    /// Thermal freezing-length ratio versus temperature, with the (N, T_c) fit
    Thermal(ThermalArgs),
    /// Oracle-vs-pipeline equivalence suite on randomized chains
    OracleCheck(OracleCheckArgs),
}

/// Options shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Flat key=value config file; command-line flags override it
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output path, "-" for stdout
    #[arg(long, short)]
    output: Option<String>,
    /// Output format: csv, json or both ("both" needs a file path)
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (default: XYCHAIN_THREADS or all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of spins
    #[arg(long)]
    n: Option<usize>,
    /// Fixed y end coupling(s), comma separated
    #[arg(long)]
    lambda2: Option<String>,
    /// lambda1 grid as start:stop:step
    #[arg(long)]
    lambda1: Option<String>,
    /// Bulk anisotropy
    #[arg(long)]
    gamma: Option<f64>,
    /// Inverse temperature (omit for the ground state)
    #[arg(long)]
    beta: Option<f64>,
    /// Temperature in units of kappa/k_B (alternative to --beta)
    #[arg(long)]
    temperature: Option<f64>,
    /// Discord plateau tolerance in bits
    #[arg(long)]
    eps: Option<f64>,
    /// Concurrence threshold for sudden death
    #[arg(long)]
    eps_esd: Option<f64>,
    /// Cross-check a few grid points against exact diagonalization (N <= 12)
    #[arg(long, action = ArgAction::SetTrue)]
    verify_oracle: bool,
}

#[derive(Args, Clone)]
pub struct SurfaceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    /// lambda1 grid as start:stop:step
    #[arg(long)]
    lambda1: Option<String>,
    /// lambda2 grid as start:stop:step
    #[arg(long)]
    lambda2: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
}

#[derive(Args, Clone)]
pub struct GapArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain sizes, comma separated
    #[arg(long)]
    n: Option<String>,
    /// Fixed y end coupling(s), comma separated
    #[arg(long)]
    lambda2: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Gap plateau tolerance
    #[arg(long)]
    gap_tol: Option<f64>,
}

#[derive(Args, Clone)]
pub struct AnisotropyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain sizes, comma separated
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// gamma grid as start:stop:step
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_esd: Option<f64>,
}

#[derive(Args, Clone)]
pub struct ThermalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain sizes, comma separated
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// Temperature grid as start:stop:step, units of kappa/k_B
    #[arg(long)]
    temps: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Freezing counts as intact while l_f^beta / l_f >= rho_min
    #[arg(long)]
    rho_min: Option<f64>,
    /// Use a frozen-value tolerance of rel_tol * D_f instead of eps bits
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Clone)]
pub struct OracleCheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain sizes to draw from, comma separated (each <= 12)
    #[arg(long)]
    n: Option<String>,
    /// Number of randomized chains
    #[arg(long)]
    specs: Option<usize>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for exactly-computed quantities
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for measurement-grid quantities (classical, discord)
    #[arg(long)]
    tol_grid: Option<f64>,
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Sweep(a) => &a.common,
            Command::Surface(a) => &a.common,
            Command::Gap(a) => &a.common,
            Command::Anisotropy(a) => &a.common,
            Command::Thermal(a) => &a.common,
            Command::OracleCheck(a) => &a.common,
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let common = cli.command.common().clone();
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::empty(),
    };

    let threads = match common.threads.or(file.get("threads")?) {
        Some(t) => Some(t),
        None => match std::env::var("XYCHAIN_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                CliError::Validation(format!("XYCHAIN_THREADS must be an integer, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };

    let dataset = {
        let build = || match &cli.command {
            Command::Sweep(args) => commands::cmd_sweep(args, &file),
            Command::Surface(args) => commands::cmd_surface(args, &file),
            Command::Gap(args) => commands::cmd_gap(args, &file),
            Command::Anisotropy(args) => commands::cmd_anisotropy(args, &file),
            Command::Thermal(args) => commands::cmd_thermal(args, &file),
            Command::OracleCheck(args) => commands::cmd_oracle_check(args, &file),
        };
        match threads {
            Some(t) => {
                if t == 0 {
                    return Err(CliError::Validation("threads must be positive".into()));
                }
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
                pool.install(build)?
            }
            None => build()?,
        }
    };

    let sink = output::Sink::resolve(&common, &file)?;
    sink.write(&dataset)?;

    if let Some(failures) = dataset.failed_checks() {
        return Err(CliError::Runtime(format!(
            "{failures} equivalence check(s) exceeded tolerance"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return match kind {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xychain: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
