use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Simulate angle-of-arrival estimation under jamming.
#[derive(Debug, Parser)]
#[command(name = "aoa-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Master seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trial count, overriding the file.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CRB curves without jamming, with uniform jamming and with the optimal
    /// signal-unaware jammer.
    Crb(Common),
    /// First-trial ML spectrum plus a summary of all trials.
    Spectrum(Common),
    /// One summary row per value of a numeric scenario key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Key to vary, e.g. power_ratio or n_r.
        #[arg(long)]
        param: String,
        /// Values, comma or space separated.
        #[arg(long, value_delimiter = ',', num_args = 0.., required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Crb(c) => commands::load(c.into()).and_then(|cfg| commands::crb(&cfg, &c.out)),
        Command::Spectrum(c) => commands::load(c.into()).and_then(|cfg| commands::spectrum(&cfg, &c.out)),
        Command::Sweep { common, param, values } => {
            commands::load(common.into()).and_then(|cfg| commands::sweep(&cfg, param, values, &common.out))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<&Common> for commands::Source {
    fn from(c: &Common) -> Self {
        commands::Source { config: c.config.clone(), seed: c.seed, trials: c.trials }
    }
}
