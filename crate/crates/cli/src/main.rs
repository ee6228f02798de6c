use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nlground_cli::{load_config, run, CliError};

/// Ground states and existence criteria for variable-exponent field equations.
#[derive(Parser)]
#[command(name = "nlground", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the solver perturbation and the lemma checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Do not print the report.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.raw.output.dir));
    let out = run(&cfg, &dir)?;
    if !args.quiet {
        print!("{}", out.report);
    }
    Ok(out.status.exit_code())
}
