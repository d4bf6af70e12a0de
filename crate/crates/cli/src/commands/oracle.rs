use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use povstim::dataset::{parse_line, read_metadata, DatasetError, Format};
use povstim::grammar::{Grammar, Task};
use povstim::tokenize;
use povstim::transform::{self, TraceStep, TransformRule};

use crate::common::{data, open_output, read_text, sidecar_for, write_sidecar, GrammarArgs};

/// Which rule to apply: a strategy resolved per sentence, or one named
/// rule for every sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleChoice {
    Hierarchical,
    Linear,
    Named(TransformRule),
}

impl FromStr for RuleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "hierarchical" => RuleChoice::Hierarchical,
            "linear" => RuleChoice::Linear,
            "move-main" => RuleChoice::Named(TransformRule::MoveMain),
            "move-first" => RuleChoice::Named(TransformRule::MoveFirst),
            "move-object" => RuleChoice::Named(TransformRule::MoveObject),
            "move-second" => RuleChoice::Named(TransformRule::MoveSecond),
            "identity" => RuleChoice::Named(TransformRule::Identity),
            other => {
                return Err(format!(
                    "unknown rule `{other}` (expected hierarchical, linear, move-main, move-first, move-object, move-second or identity)"
                ))
            }
        })
    }
}

impl RuleChoice {
    fn resolve(self, task: Option<Task>) -> TransformRule {
        match (self, task) {
            (RuleChoice::Named(r), _) => r,
            (_, None) => TransformRule::Identity,
            (RuleChoice::Hierarchical, Some(t)) => TransformRule::hierarchical(t),
            (RuleChoice::Linear, Some(t)) => TransformRule::linear(t),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// hierarchical, linear, or a rule name (move-main, move-first,
    /// move-object, move-second, identity).
    #[arg(long, default_value = "hierarchical")]
    pub rule: RuleChoice,
    /// A split file (source<TAB>target) or one declarative sentence per
    /// line.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Format of a split file [default: from metadata.json, else
    /// prefix-first].
    #[arg(long)]
    pub format: Option<Format>,
    /// Output file, one transformed sentence per line [default: stdout].
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write one JSON object per line with the rule and edit trace.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    source: &'a [String],
    rule: TransformRule,
    output: &'a [String],
    trace: &'a [TraceStep],
}

struct Item {
    source: Vec<String>,
    /// `None` for identity examples of a split file.
    task: Option<Task>,
    from_split: bool,
}

fn load_items(path: &Path, format: Option<Format>) -> Result<Vec<Item>> {
    let text = read_text(path)?;
    let tabular = text.lines().any(|l| l.contains('\t'));
    let format = match (format, tabular) {
        (Some(f), _) => f,
        (None, true) => path
            .parent()
            .and_then(|d| read_metadata(d).ok())
            .map_or(Format::PrefixFirst, |m| m.format),
        (None, false) => Format::PrefixFirst,
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            if tabular {
                let (task, source, _) = parse_line(line, format).map_err(|message| DatasetError::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message,
                })?;
                Ok(Item {
                    source,
                    task: task.transformation(),
                    from_split: true,
                })
            } else {
                Ok(Item {
                    source: tokenize::normalize(line),
                    task: None,
                    from_split: false,
                })
            }
        })
        .collect()
}

/// Applies the rule to every reading of `source`; the readings must agree.
fn transform_one(grammar: &Grammar, item: &Item, choice: RuleChoice) -> Result<(TransformRule, transform::TransformResult)> {
    let trees = grammar.parses(&item.source)?;
    let mut result: Option<(TransformRule, transform::TransformResult)> = None;
    for tree in &trees {
        let task = if item.from_split { item.task } else { Some(tree.structure().task) };
        let rule = choice.resolve(task);
        let r = transform::apply(rule, grammar, tree)?;
        match &result {
            None => result = Some((rule, r)),
            Some((_, first)) if first.output != r.output => {
                return Err(data(format!(
                    "`{}` has readings with different outputs: `{}` and `{}`",
                    item.source.join(" "),
                    first.output.join(" "),
                    r.output.join(" ")
                )))
            }
            Some(_) => {}
        }
    }
    result.ok_or_else(|| data(format!("`{}` has no parse", item.source.join(" "))))
}

pub fn run(args: OracleArgs) -> Result<()> {
    let grammar = args.grammar.load()?;
    let items = load_items(&args.input, args.format)?;
    if items.is_empty() {
        return Err(data(format!("{} holds no sentences", args.input.display())));
    }
    let results: Vec<(TransformRule, transform::TransformResult)> = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| transform_one(grammar, item, args.rule).with_context(|| format!("line {}", i + 1)))
        .collect::<Result<_>>()?;

    let mut out = open_output(args.output.as_deref())?;
    for (_, r) in &results {
        writeln!(out, "{}", r.output.join(" "))?;
    }
    out.flush()?;
    if let Some(path) = &args.trace {
        let mut w = open_output(Some(path))?;
        for (item, (rule, r)) in items.iter().zip(&results) {
            let line = TraceLine {
                source: &item.source,
                rule: *rule,
                output: &r.output,
                trace: &r.trace,
            };
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
        w.flush()?;
    }
    if let Some(path) = &args.output {
        write_sidecar(&sidecar_for(path), "oracle", &args)?;
    }
    Ok(())
}
