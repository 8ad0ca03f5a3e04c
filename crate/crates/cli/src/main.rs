//! `qsljc` — detuned qubit-cavity channel: back-flow measure, QSL times,
//! and figure-style parameter sweeps as deterministic CSV.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-convergence
//! failure, 4 I/O error.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RawConfig, Regime, RunConfig};

/// CLI-level error, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qsljc_core::Error> for CliError {
    fn from(e: qsljc_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qsljc",
    version,
    about = "Detuned qubit-cavity amplitude damping: back-flow measure and quantum-speed-limit times",
    after_help = "All rates are in units of gamma and times in units of 1/gamma. \
                  Outputs are CSV files in --out (default: current directory)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: CommonOpts,
}

#[derive(Args)]
struct CommonOpts {
    /// Coupling rate gamma (sets the time unit)
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Spectral width lambda, in units of gamma
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Detuning delta, in units of gamma (may be negative)
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,

    /// Driving time tau, in units of 1/gamma
    #[arg(long, global = true)]
    tau: Option<f64>,

    /// Bloch component r_x of the initial state
    #[arg(long, global = true, allow_negative_numbers = true)]
    rx: Option<f64>,

    /// Bloch component r_y of the initial state
    #[arg(long, global = true, allow_negative_numbers = true)]
    ry: Option<f64>,

    /// Bloch component r_z of the initial state
    #[arg(long, global = true, allow_negative_numbers = true)]
    rz: Option<f64>,

    /// Initial l1 coherence (alternative to rx/ry/rz)
    #[arg(long, global = true)]
    c0: Option<f64>,

    /// Initial excited-population component <sigma_z> (with --c0)
    #[arg(long, global = true, allow_negative_numbers = true)]
    sz0: Option<f64>,

    /// Grid resolution override (points per axis)
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Back-flow truncation horizon: a time, or `auto`
    #[arg(long, global = true)]
    horizon: Option<String>,

    /// Output directory for CSV files
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Config file (flat `key = value`, `#` comments); flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Add brute-force cross-check deviation column(s)
    #[arg(long, global = true)]
    oracle: bool,

    /// Worker threads for sweeps (default: machine parallelism)
    #[arg(long, global = true, env = "QSLJC_JOBS")]
    jobs: Option<usize>,

    /// Regime selection for fig6 (default: emit both)
    #[arg(long, global = true, value_enum)]
    regime: Option<Regime>,
}

impl CommonOpts {
    fn to_raw(&self) -> RawConfig {
        RawConfig {
            gamma: self.gamma,
            lambda: self.lambda,
            delta: self.delta,
            tau: self.tau,
            rx: self.rx,
            ry: self.ry,
            rz: self.rz,
            c0: self.c0,
            sz0: self.sz0,
            grid: self.grid,
            horizon: self.horizon.clone(),
            out: self.out.clone(),
            jobs: self.jobs,
            regime: self.regime,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Back-flow measure over the (delta, lambda) plane
    Fig1,
    /// QSL time, back-flow, and population vs detuning at two widths
    Fig2,
    /// QSL time, population, and back-flow vs driving time at two widths
    Fig3,
    /// QSL time and population vs driving time across detunings (lambda=3)
    Fig4,
    /// QSL time and population vs driving time across detunings (lambda=0.1)
    Fig5,
    /// QSL time over the (coherence, detuning) plane
    Fig6,
    /// Single QSL evaluation for one parameter set
    Qsl,
    /// Single back-flow measure evaluation with revival intervals
    Nm,
    /// State trajectory under the channel
    Evolve,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut raw = RawConfig::default();
    if let Some(path) = &cli.opts.config {
        raw.overlay(config::parse_config_file(path)?);
    }
    raw.overlay(cli.opts.to_raw());
    let cfg = RunConfig::from_raw(&raw, cli.opts.oracle)?;

    let body = |cfg: &RunConfig| match cli.command {
        Command::Fig1 => commands::fig1(cfg),
        Command::Fig2 => commands::fig2(cfg),
        Command::Fig3 => commands::fig3(cfg),
        Command::Fig4 => commands::fig4(cfg),
        Command::Fig5 => commands::fig5(cfg),
        Command::Fig6 => commands::fig6(cfg),
        Command::Qsl => commands::qsl(cfg),
        Command::Nm => commands::nm(cfg),
        Command::Evolve => commands::evolve_cmd(cfg),
    };

    match cfg.jobs {
        None => body(&cfg),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| body(&cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors, 0 for --help/--version
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsljc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
