use clap::{Parser, Subcommand};

use privgame_cli::commands::{self, datagen, eval, sweep, train, CliError};

/// Synthesize, train, and evaluate data-privatization mechanisms.
///
/// Exit codes: 0 on success, 2 for usage errors, 1 for runtime failures.
/// Diagnostics go to stderr; stdout carries only data and paths.
#[derive(Parser)]
#[command(name = "privgame", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded synthetic dataset and write it as CSV.
    Datagen(datagen::DatagenArgs),
    /// Solve for optimal mechanisms over a grid of distortion budgets.
    Theory(commands::theory::TheoryArgs),
    /// Train privatizer and adversary networks on a dataset.
    Train(train::TrainArgs),
    /// Evaluate a mechanism file against the exact MAP adversary.
    Eval(eval::EvalArgs),
    /// Joined theory-vs-trained tradeoff sweep over a budget grid.
    Sweep(sweep::SweepArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Datagen(args) => datagen::run(args),
        Cmd::Theory(args) => commands::theory::run(args),
        Cmd::Train(args) => train::run(args),
        Cmd::Eval(args) => eval::run(args),
        Cmd::Sweep(args) => sweep::run(args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
