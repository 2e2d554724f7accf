use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::CliError;

/// Dual curves: Frenet apparatus, Mannheim pairs, line geometry and ruled
/// surfaces.
#[derive(Debug, Parser)]
#[command(name = "dualfrenet", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curve JSON -> CSV of the dual Frenet apparatus over a grid.
    Frenet,
    /// Curve JSON -> straight-line and planarity classification JSON.
    Classify,
    /// Pair JSON -> bundle directory (two curve tables and pair.json).
    MannheimGenerate,
    /// Bundle directory -> report JSON of every pair check.
    MannheimVerify,
    /// Line JSON <-> dual vector JSON; a two-element array gives the
    /// geometry of the pair.
    Study,
    /// Curve or patch JSON -> OBJ mesh.
    RuledExport,
    /// Run the acceptance suite and print a pass/fail table.
    Selftest,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Input file (a directory for mannheim-verify).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (a directory for mannheim-generate); stdout if absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Threshold for theorem residuals.
    #[arg(long, global = true)]
    pub tol_thm: Option<f64>,
    /// Threshold for normal/binormal parallelism.
    #[arg(long, global = true)]
    pub tol_pair: Option<f64>,
    /// Integration step for mannheim-generate.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Grid size (frenet, ruled-export) or correspondence samples (mannheim-*).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Ruling parameter range for ruled-export.
    #[arg(long, global = true, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub u_range: Option<Vec<f64>>,
    /// Vertices per ruling for ruled-export.
    #[arg(long, global = true)]
    pub u_samples: Option<usize>,
    /// Use all cores for sample-level work (single-threaded otherwise).
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Seed for the randomized selftest suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

pub const TOL_SCALE_VAR: &str = "DUALFRENET_TOL_SCALE";

/// What a command produced.
pub enum Output {
    Text(String),
    /// Written by the command itself; the text goes to stdout.
    Done(String),
}

fn emit(out: Output, path: Option<&Path>) -> Result<(), CliError> {
    match (out, path) {
        (Output::Text(s), Some(p)) => {
            fs::write(p, s).map_err(|e| CliError::Malformed(format!("{}: {e}", p.display())))
        }
        (Output::Text(s), None) | (Output::Done(s), _) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(s.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.opts.parallel {
        // outputs are order-stable either way; this only limits the pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let scale = std::env::var(TOL_SCALE_VAR).ok();
    let result = commands::run(&cli.command, &cli.opts, scale.as_deref())
        .and_then(|(out, ok)| emit(out, commands::output_file(&cli.command, &cli.opts)).map(|_| ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}: {}", e.name(), e);
            ExitCode::from(e.exit_code())
        }
    }
}
