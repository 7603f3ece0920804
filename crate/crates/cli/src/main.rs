//! `amgan`: property checks, score evaluation, mode-drop simulation and
//! desk-scale GAN training from the command line.
//!
//! Exit status: 0 success, 1 property failure, 2 usage or input error,
//! 3 training divergence.

mod cmd;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

pub const OUT_DIR_ENV: &str = "AMGAN_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "amgan-out";

#[derive(Debug, Parser)]
#[command(
    name = "amgan",
    version,
    about = "Class-aware GAN losses, scores and training experiments"
)]
struct Cli {
    /// Flat `key = value` file, or a manifest.json from an earlier run.
    /// Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the seeded property suites and write a JSON report.
    Verify(cmd::verify::Args),
    /// Simulate dropping points from a one-hot batch and record the log score.
    Modedrop(cmd::modedrop::Args),
    /// Train one model on the Gaussian mixture for one or more seeds.
    Train(cmd::train::Args),
    /// Score a classifier batch, or a sample dump through the mixture oracle.
    Score(cmd::score::Args),
    /// Tabulate final snapshots of several training runs with group medians.
    Compare(cmd::compare::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Modedrop(_) => "modedrop",
            Command::Train(_) => "train",
            Command::Score(_) => "score",
            Command::Compare(_) => "compare",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Property(String),
    Diverged(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Property(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Diverged(_) => 3,
        }
    }
}

impl From<amgan_core::Error> for CliError {
    fn from(e: amgan_core::Error) -> Self {
        match e {
            amgan_core::Error::Diverged { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let name = cli.command.name();
    let ctx = cmd::Context {
        config: cli.config.clone(),
        out,
    };
    let result = match cli.command {
        Command::Verify(a) => cmd::verify::run(&ctx, a),
        Command::Modedrop(a) => cmd::modedrop::run(&ctx, a),
        Command::Train(a) => cmd::train::run(&ctx, a),
        Command::Score(a) => cmd::score::run(&ctx, a),
        Command::Compare(a) => cmd::compare::run(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => {
                    eprintln!("error: {m}");
                    if let Some(sub) = Cli::command().find_subcommand_mut(name) {
                        eprintln!("\n{}", sub.render_usage());
                    }
                }
                CliError::Property(m) => eprintln!("property failure: {m}"),
                CliError::Diverged(m) => eprintln!("{m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
