//! `steerctl`: batch driver for steering-robustness evaluation and pulse
//! optimization.
//!
//! ```text
//! steerctl <command> --config <path> [--out <prefix>] [--seed <int>]
//! ```
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! errors, 1 when results cannot be written. The worker thread count follows
//! `RAYON_NUM_THREADS`.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::Command;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "steerctl", version, about = "Steering robustness under noisy, controlled qubit dynamics")]
struct Cli {
    /// What to run.
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output path prefix (`.csv` or `.json` is appended). Overrides the
    /// config's `output`; defaults to `<config stem>.<command>` next to the
    /// config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// RNG seed for the random starts; overrides `optimize.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::load(&cli.config).and_then(|cfg| {
        let out = cli
            .out
            .clone()
            .or_else(|| cfg.output.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| cli.config.with_extension(cli.command.to_string()));
        for ext in ["csv", "json"] {
            let mut target = out.clone().into_os_string();
            target.push(".");
            target.push(ext);
            if target == cli.config.as_os_str() {
                return Err(CliError::Config(format!("output prefix {} would overwrite the config", out.display())));
            }
        }
        run::execute(cli.command, &cfg, cli.seed, &out)
    });
    match result {
        Ok(outcome) => {
            println!("{}", outcome.headline);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("steerctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
