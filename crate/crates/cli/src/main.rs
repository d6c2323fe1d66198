//! `minisuper`: build, decompose and solve the minisuperspace operators from
//! the command line.
//!
//! Every command writes its files and a `manifest.json` into `--out` and
//! prints a JSON summary on stdout. Exit codes: 0 success, 2 usage or
//! configuration error, 3 numerical failure.

mod commands;
mod config;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use minisuper_core::Error;

use config::{FileConfig, Overrides, Resolved};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::NoHorizon { .. }
            | Error::Settings(_)
            | Error::Dimension(_)
            | Error::Arity { .. }
            | Error::UnsupportedBasis { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "minisuper", version, about = "Schwarzschild-de Sitter minisuperspace operators on qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pauli expansion of 4M (or 2bH).
    Decompose(Common),
    /// Multi-start variational minimization of 4M.
    Vqe(Common),
    /// 4M eigenstates satisfying the constraint.
    Spectrum(Common),
    /// Horizon thermodynamics at one mass or over a sweep.
    Thermo(Common),
    /// Continuum wavefunctions of the constrained states and the WKB form.
    Wavefn(Common),
    /// Potential and mass-level grids.
    Grids(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Vqe(_) => "vqe",
            Command::Spectrum(_) => "spectrum",
            Command::Thermo(_) => "thermo",
            Command::Wavefn(_) => "wavefn",
            Command::Grids(_) => "grids",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Decompose(c)
            | Command::Vqe(c)
            | Command::Spectrum(c)
            | Command::Thermo(c)
            | Command::Wavefn(c)
            | Command::Grids(c) => c,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration; every section is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Base seed; the seed list becomes N, N+1, ...
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    qubits: Option<usize>,
    /// Black-hole mass for thermo, wavefn (WKB) and grids (contour level).
    #[arg(long = "M")]
    mass: Option<f64>,
    /// Mass sweep `a:b:n` for thermo.
    #[arg(long)]
    sweep: Option<String>,
    /// Pauli coefficient magnitude treated as zero.
    #[arg(long)]
    threshold: Option<f64>,
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let started = Instant::now();
    let c = cli.command.common();
    let (file, bytes) = match &c.config {
        Some(path) => {
            let (f, b) = FileConfig::load(path)?;
            (f, Some(b))
        }
        None => (FileConfig::default(), None),
    };
    let overrides = Overrides {
        seed: c.seed,
        lambda: c.lambda,
        qubits: c.qubits,
        threshold: c.threshold,
    };
    let resolved = Resolved::new(file, &overrides)?;
    prepare_dir(&c.out)?;

    let outcome = match &cli.command {
        Command::Decompose(_) => commands::decompose_cmd(&resolved, &c.out),
        Command::Vqe(_) => commands::vqe_cmd(&resolved, &c.out),
        Command::Spectrum(_) => commands::spectrum_cmd(&resolved, &c.out),
        Command::Thermo(_) => commands::thermo_cmd(&resolved, &c.out, c.mass, c.sweep.as_deref()),
        Command::Wavefn(_) => commands::wavefn_cmd(&resolved, &c.out, c.mass),
        Command::Grids(_) => commands::grids_cmd(&resolved, &c.out, c.mass),
    }?;

    let m = manifest::RunManifest {
        command: cli.command.name(),
        args: std::env::args().skip(1).collect(),
        config_path: c.config.as_ref().map(|p| p.display().to_string()),
        output_dir: c.out.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION"),
        seeds: &resolved.seeds,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        input_hash: manifest::input_hash(bytes.as_deref(), &resolved)?,
        resolved: &resolved,
        outputs: outcome.outputs,
    };
    manifest::write(&c.out, &m)?;
    Ok(outcome.summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary is valid JSON");
            // a closed stdout (e.g. piped into `head`) is not a failure of the run
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("minisuper: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
