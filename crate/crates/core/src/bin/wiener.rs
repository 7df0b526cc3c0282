use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wiener_kernels::experiment::{self, ExperimentConfig, Task};

#[derive(Parser)]
#[command(
    name = "wiener",
    about = "Kernel-algebra property suites and inverse-decay experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; unset keys take the task defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel-algebra identities on seeded random kernels.
    Axioms(Common),
    /// R, Π, W and θ identities on a finite group.
    CovarianceCheck(Common),
    /// Spectrum of f*⋆f in the covariance algebra of a finite group.
    SymmetryCheck(Common),
    /// Finite-section inversion with decay report.
    Invert(Common),
    /// Inversion plus decay-rate fit.
    Decay(Common),
    /// Compact-support approximation bounds.
    IdealApprox(Common),
    /// Contour-integral inverse against the direct section inverse.
    Contour(Common),
    /// Read or generate a kernel and write it with its envelope.
    KernelIo(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, common) = match cli.command {
        Command::Axioms(c) => (Task::Axioms, c),
        Command::CovarianceCheck(c) => (Task::CovarianceCheck, c),
        Command::SymmetryCheck(c) => (Task::SymmetryCheck, c),
        Command::Invert(c) => (Task::Invert, c),
        Command::Decay(c) => (Task::Decay, c),
        Command::IdealApprox(c) => (Task::IdealApprox, c),
        Command::Contour(c) => (Task::Contour, c),
        Command::KernelIo(c) => (Task::KernelIo, c),
    };
    let mut cfg = match &common.config {
        Some(path) => match ExperimentConfig::load_for(task, path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::for_task(task),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    match experiment::run(&cfg, &common.out) {
        Ok(outcome) => {
            print!("{}", outcome.table());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code_for(&e) as u8)
        }
    }
}
