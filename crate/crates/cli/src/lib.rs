//! Command-line front end for `spinpump`: velocity maps, charge densities,
//! parameter sweeps, APT components and pulse sequences, written as CSV and
//! JSON files.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<spinpump::Error> for CliError {
    fn from(e: spinpump::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spinpump",
    version,
    about = "Generalized Thouless pump simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file with the flag names as keys; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// ⟨v⟩/‖v‖ over the k × τ grid (velmap.csv)
    Velmap,
    /// Charge density q(k) and its integral (qk.csv, qk.json)
    Qk,
    /// Q over δ₂/δ₁ for every protocol and T (sweep.csv, sweep.json)
    Sweep,
    /// APT components for the designed initial state (apt.json)
    Apt,
    /// Compiled pulse sequence and optional fidelity check (pulses.txt, pulses.json)
    Pulses,
}

/// Resolves the config file and flags, then runs `command` on a pool of the
/// requested size.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let threads = cfg.threads.unwrap_or(0);
    if cfg.threads == Some(0) {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Velmap => commands::velmap(cfg),
        Command::Qk => commands::qk(cfg),
        Command::Sweep => commands::sweep_cmd(cfg),
        Command::Apt => commands::apt(cfg),
        Command::Pulses => commands::pulses(cfg),
    })
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli
        .config
        .as_deref()
        .map(RunConfig::from_file)
        .transpose()
        .map(|file| file.unwrap_or_default().overridden_by(cli.run.clone()))
        .and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
