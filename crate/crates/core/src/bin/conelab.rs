use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conelab::error::ConeError;
use conelab::harness::{self, Command, RunConfig};

/// Propagator kernels on product cones: decay scans and inequality checks.
///
/// Exit status: 0 when the verdict passes (or the scan ran outside the
/// theorem hypotheses), 1 when it fails, 2 on invalid input, 3 when the mode
/// budget ran out and only a partial report was written, 4 on other errors.
#[derive(Debug, Parser)]
#[command(name = "conelab", version)]
struct Cli {
    /// One of: spectrum, check-hypothesis, distance-spectrum, weber, hankel,
    /// heat, schrodinger-decay, halfwave-decay, poisson-decay, bernstein,
    /// square, besov, report.
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let base = cli.config.parent();
    match harness::run(cli.command, &cfg, base, &cli.out) {
        Ok(s) => {
            println!("{}: {} (config {})", s.command, s.verdict, s.config_hash);
            if s.pass || s.verdict == "outside theorem hypotheses" {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                ConeError::Config(_) | ConeError::Domain(_) | ConeError::InsufficientData(_) => 2,
                ConeError::BudgetExceeded { .. } => 3,
                _ => 4,
            })
        }
    }
}
