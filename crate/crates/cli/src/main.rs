use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod common;

use commands::{compose, estimate, evaluate, generate, mine, oracle, report, sample};

/// Poverty-of-the-stimulus transformation datasets, rule oracles,
/// evaluation and corpus mining.
#[derive(Parser)]
#[command(name = "povstim", version, about)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build train/dev/test/gen splits for one language and task.
    Generate(generate::GenerateArgs),
    /// Print sentences of one structure.
    Sample(sample::SampleArgs),
    /// Apply a transformation rule to sentences or a split file.
    Oracle(oracle::OracleArgs),
    /// Score a prediction file against a split.
    Evaluate(evaluate::EvaluateArgs),
    /// Turn checkpointed evaluation reports into per-metric curves.
    Report(report::ReportArgs),
    /// Scan a corpus for adjacent declarative/question pairs.
    Mine(mine::MineArgs),
    /// Expected number of disambiguating examples from pair and RC rates.
    Estimate(estimate::EstimateArgs),
    /// Mix single-language builds into a cross-lingual training set.
    Compose(compose::ComposeArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { common::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("POVSTIM_LOG")
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Sample(a) => sample::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Report(a) => report::run(a),
        Command::Mine(a) => mine::run(a),
        Command::Estimate(a) => estimate::run(a),
        Command::Compose(a) => compose::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(common::exit_code(&e))
        }
    }
}
