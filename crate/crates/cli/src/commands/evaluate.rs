use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use povstim::dataset::{read_metadata, read_split, Format};
use povstim::eval::{check_alignment, emit_curve, evaluate, read_predictions, SeqMode};
use povstim::features::Language;
use povstim::grammar::{Grammar, Task};

use crate::common::{data, open_output, sidecar_for, usage, write_json, write_sidecar, GrammarArgs};

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// Split file (source<TAB>target).
    #[arg(long)]
    pub split: PathBuf,
    /// One prediction per line, aligned with the split; lines may also be
    /// `source<TAB>prediction`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Task to score [default: the split's transformation task].
    #[arg(long)]
    pub task: Option<Task>,
    /// Split file format [default: from metadata.json, else prefix-first].
    #[arg(long)]
    pub format: Option<Format>,
    /// exact or subsequence.
    #[arg(long, default_value = "exact")]
    pub mode: SeqMode,
    /// Training iteration the predictions come from.
    #[arg(long)]
    pub checkpoint: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write the report as checkpoint,metric,value CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let metadata = args.split.parent().and_then(|d| read_metadata(d).ok());
    let format = args
        .format
        .or(metadata.as_ref().map(|m| m.format))
        .unwrap_or(Format::PrefixFirst);
    let explicit = if args.grammar.is_set() { Some(args.grammar.load()?) } else { None };
    let grammars: Vec<&Grammar> = match explicit {
        Some(g) => vec![g],
        None => Language::ALL.iter().map(|&l| Grammar::builtin(l)).collect(),
    };
    let examples = read_split(&args.split, format, &grammars)?;
    if examples.is_empty() {
        return Err(data(format!("{} is empty", args.split.display())));
    }
    let languages: BTreeSet<Language> = examples.iter().map(|e| e.language).collect();
    if languages.len() > 1 {
        return Err(usage("the split mixes languages; evaluate one language at a time"));
    }
    let language = *languages.first().expect("non-empty");
    let grammar = explicit.unwrap_or_else(|| Grammar::builtin(language));

    let tasks: BTreeSet<Task> = examples.iter().filter_map(|e| e.task.transformation()).collect();
    let task = match (args.task, tasks.len()) {
        (Some(t), _) => t,
        (None, 1) => *tasks.first().expect("one task"),
        (None, 0) => return Err(usage("the split has no transformed examples; pass --task")),
        (None, _) => return Err(usage("the split mixes tasks; pass --task")),
    };

    let lines = read_predictions(&args.predictions)?;
    check_alignment(&examples, &lines, grammar.lexicon())
        .with_context(|| format!("{} against {}", args.predictions.display(), args.split.display()))?;
    let preds: Vec<Vec<String>> = lines.into_iter().map(|l| l.prediction).collect();
    let report = evaluate(grammar, task, &examples, &preds, args.mode, args.checkpoint)?;

    match &args.out {
        Some(path) => {
            write_json(path, &report)?;
            write_sidecar(&sidecar_for(path), "evaluate", &args)?;
        }
        None => {
            let mut out = open_output(None)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            out.flush()?;
        }
    }
    if let Some(path) = &args.csv {
        let mut w = open_output(Some(path))?;
        emit_curve(std::slice::from_ref(&report), &mut w)?;
        w.flush()?;
    }
    Ok(())
}
