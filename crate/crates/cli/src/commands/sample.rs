use std::io::Write;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use povstim::grammar::StructureSpec;
use povstim::seed::derive_seed;

use crate::common::{open_output, GrammarArgs};

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// Structure such as `quest/on-subject/rc/trans/subject-gap` or
    /// `passiv/on-object/pp`.
    #[arg(long)]
    pub structure: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long, default_value_t = 5)]
    pub n: usize,
    /// Print bracketed trees instead of sentences.
    #[arg(long)]
    pub tree: bool,
}

pub fn run(args: SampleArgs) -> Result<()> {
    let grammar = args.grammar.load()?;
    let spec: StructureSpec = args.structure.parse().map_err(crate::common::usage)?;
    spec.validate()?;
    let mut out = open_output(None)?;
    for i in 0..args.n {
        let tree = grammar.sample_sentence(&spec, derive_seed(&[args.seed, i as u64]))?;
        if args.tree {
            writeln!(out, "{tree}")?;
        } else {
            writeln!(out, "{}", tree.tokens().join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}
