use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use povstim::dataset::{build_splits, write_manifest, DatasetConfig, Format, SplitCounts};
use povstim::grammar::Task;

use crate::common::{usage, write_sidecar, GrammarArgs};

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// quest or passiv.
    #[arg(long)]
    pub task: Task,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory [default: <lang>-<task>-seed<seed>].
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// prefix-first (`quest: ...`) or marker-last (`... quest`).
    #[arg(long, default_value = "prefix-first")]
    pub format: Format,
    #[arg(long, default_value_t = 100_000)]
    pub train: usize,
    #[arg(long, default_value_t = 1_000)]
    pub dev: usize,
    #[arg(long, default_value_t = 10_000)]
    pub test: usize,
    #[arg(long, default_value_t = 10_000)]
    pub gen: usize,
    /// Share of identity (decl) examples in train, dev and test.
    #[arg(long, default_value_t = 0.5)]
    pub identity_fraction: f64,
    /// Allow repeated sources within a split.
    #[arg(long)]
    pub no_dedup: bool,
}

pub fn run(args: GenerateArgs) -> Result<()> {
    let grammar = args.grammar.load()?;
    if !(0.0..=1.0).contains(&args.identity_fraction) {
        return Err(usage(format!(
            "--identity-fraction {} is outside [0, 1]",
            args.identity_fraction
        )));
    }
    if [args.train, args.dev, args.test, args.gen].contains(&0) {
        return Err(usage("split sizes must be positive"));
    }
    let mut config = DatasetConfig::new(grammar.language(), args.task, args.seed);
    config.counts = SplitCounts {
        train: args.train,
        dev: args.dev,
        test: args.test,
        gen: args.gen,
    };
    config.identity_fraction = args.identity_fraction;
    config.dedup = !args.no_dedup;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-{}-seed{}", grammar.language(), args.task, args.seed)));
    let manifest = build_splits(grammar, &config).context("building splits")?;
    let metadata = write_manifest(&manifest, &out, args.format)?;
    write_sidecar(&out.join("run.json"), "generate", &args)?;
    for (name, info) in &metadata.splits {
        log::info!("{name}: {} examples ({} identity)", info.count, info.identity);
    }
    println!("{}", out.display());
    Ok(())
}
