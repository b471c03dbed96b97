//! The `kerrcqa` batch front end.
//!
//! Each subcommand reads one JSON [`RunConfig`], applies command-line
//! overrides, and writes its files into the output directory. Every file
//! starts with the resolved config so a result can be reproduced from it.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure,
//! 1 when an output file cannot be written. Errors are reported on standard
//! error as one JSON object `{"error", "message", "exit_code"}`.

mod commands;
mod config;
#[cfg(test)]
mod tests;

pub use config::{CommandKind, GridSpec, PhaseFunction, RunConfig};

use crate::KerrError;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "KERRCQA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "kerrcqa", version, about = "Exact steady states of driven-dissipative Kerr resonators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived constants and phase class.
    Derive(CommonArgs),
    /// Steady state: state.json and rho.csv.
    Solve(CommonArgs),
    /// Wigner or Husimi function on a grid.
    Wigner(CommonArgs),
    /// One-parameter sweep.
    Scan(CommonArgs),
    /// Slowest Lindblad decay rates.
    Spectrum(CommonArgs),
    /// Metastability of a bistable pair over κ1.
    Metastable(CommonArgs),
    /// Parity-conserving steady states over detuning.
    Parity(CommonArgs),
    /// Phase classes on an (r1, r2) grid.
    PhaseDiagram(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Fock cutoff; overrides the config.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Cross-check with the Lindblad oracle.
    #[arg(long)]
    oracle: bool,
    /// Integer-distance tolerance for classification; overrides the config.
    #[arg(long)]
    tol: Option<f64>,
}

impl Command {
    fn split(self) -> (CommandKind, CommonArgs) {
        match self {
            Command::Derive(a) => (CommandKind::Derive, a),
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Wigner(a) => (CommandKind::Wigner, a),
            Command::Scan(a) => (CommandKind::Scan, a),
            Command::Spectrum(a) => (CommandKind::Spectrum, a),
            Command::Metastable(a) => (CommandKind::Metastable, a),
            Command::Parity(a) => (CommandKind::Parity, a),
            Command::PhaseDiagram(a) => (CommandKind::PhaseDiagram, a),
        }
    }
}

/// A failed run: short code, message and process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    fn io(context: &str, e: std::io::Error) -> Self {
        Self { code: "Io".into(), message: format!("{context}: {e}"), exit_code: 1 }
    }

    /// The JSON object printed on standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.code, "message": self.message, "exit_code": self.exit_code }).to_string()
    }
}

impl From<KerrError> for CliError {
    fn from(e: KerrError) -> Self {
        let exit_code = if e.is_validation() { 2 } else { 3 };
        Self { code: e.code().into(), message: e.to_string(), exit_code }
    }
}

/// Parse arguments, run, and return the exit status. Help and version text
/// go to standard output with status 0.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError { code: "Usage".into(), message: e.to_string().trim().to_string(), exit_code: 2 };
            eprintln!("{}", err.to_json());
            return 2;
        }
    };
    let (kind, args) = cli.command.split();
    match with_thread_cap(|| execute(kind, &args)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code
        }
    }
}

/// Run `f` on a pool of `KERRCQA_THREADS` workers when the variable is set.
fn with_thread_cap<R: Send>(f: impl FnOnce() -> Result<R, CliError> + Send) -> Result<R, CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return f();
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError {
        code: "Config".into(),
        message: format!("{THREADS_ENV} must be a positive integer, got {raw:?}"),
        exit_code: 2,
    })?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError {
        code: "Config".into(),
        message: e.to_string(),
        exit_code: 2,
    })?;
    pool.install(f)
}

fn execute(kind: CommandKind, args: &CommonArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError {
        code: "Config".into(),
        message: format!("cannot read {}: {e}", args.config.display()),
        exit_code: 2,
    })?;
    let mut cfg = RunConfig::parse(&text, kind)?;
    cfg.command = Some(kind);
    if args.cutoff.is_some() {
        cfg.cutoff = args.cutoff;
    }
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    cfg.oracle |= args.oracle;
    // Overrides are validated like config values.
    let resolved = serde_json::to_string(&cfg).expect("config serializes");
    let cfg = RunConfig::parse(&resolved, kind)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::io(&format!("cannot create {}", args.out.display()), e))?;
    commands::dispatch(&cfg, &resolved, &args.out)
}
