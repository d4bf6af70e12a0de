use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use povstim::dataset::{compose_crosslingual, read_manifest, write_manifest, Format, Recipe};
use povstim::features::Language;
use povstim::grammar::Grammar;

use crate::common::write_sidecar;

#[derive(Args, Debug, Serialize)]
pub struct ComposeArgs {
    /// Directories written by `generate`; repeat for each build.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Training slices, e.g. `en:quest+decl,de:decl`.
    #[arg(long)]
    pub recipe: Recipe,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value = "prefix-first")]
    pub format: Format,
}

pub fn run(args: ComposeArgs) -> Result<()> {
    let grammars: Vec<&Grammar> = Language::ALL.iter().map(|&l| Grammar::builtin(l)).collect();
    let manifests = args
        .inputs
        .iter()
        .map(|dir| read_manifest(dir, &grammars).with_context(|| format!("reading {}", dir.display())))
        .collect::<Result<Vec<_>>>()?;
    let composed = compose_crosslingual(&manifests, &args.recipe, args.seed)?;
    write_manifest(&composed, &args.out, args.format)?;
    write_sidecar(&args.out.join("run.json"), "compose", &args)?;
    println!("{}", args.out.display());
    Ok(())
}
