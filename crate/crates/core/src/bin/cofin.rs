use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cofinitary::config::{run_experiment, ExperimentConfig, Mode};

/// Build, verify and inspect finite generic approximations.
#[derive(Parser)]
#[command(name = "cofin", version)]
struct Args {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// build, tower, verify or words.
    #[arg(long)]
    mode: Mode,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to the config's output.dir, then "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Log to check in verify mode (defaults to OUT/log.jsonl).
    #[arg(long)]
    log: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match run_experiment(&cfg, args.mode, &out, args.log.as_deref()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
