use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nepv_cli::{execute, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "nepv", version, about = "Solve eigenvector-dependent nonlinear eigenvalue problems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve once; writes trace.csv and summary.json.
    Run(Args),
    /// Solve for every alpha and method; writes sweep.csv and per-cell traces.
    SweepAlpha(Args),
    /// Single-step error study; writes single_step.csv.
    SingleStep(Args),
    /// Convergence order per method; writes <method>/order.json.
    Order(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment file (INI).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory, overriding output.directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NEPV_LOG", "warn")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Run(a) => (Command::Run, a),
        Cmd::SweepAlpha(a) => (Command::SweepAlpha, a),
        Cmd::SingleStep(a) => (Command::SingleStep, a),
        Cmd::Order(a) => (Command::Order, a),
    };
    let result = ExperimentConfig::load(&args.config).and_then(|config| {
        let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
        execute(command, &config, &out, args.jobs)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("nepv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
