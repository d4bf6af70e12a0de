//! Scoring of model predictions: sequence accuracy, the diagnostic
//! first/second-word accuracies, linear-rule frequencies and fine-grained
//! error profiles.

mod align;
mod curve;
mod profile;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::TransformExample;
use crate::grammar::{Grammar, GrammarError, SentenceTree, Task};
use crate::transform::{self, TransformError, TransformRule};

pub use align::{check_alignment, read_predictions, PredictionLine};
pub use curve::{emit_curve, render_svg, write_metric_curves};
pub use profile::{error_profile, ErrorProfile, PassivErrorProfile, QuestErrorProfile};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{0} predictions for {1} examples")]
    LengthMismatch(usize, usize),
    #[error("line {line}: {message}")]
    Alignment { line: usize, message: String },
    #[error("oracle failed on `{sentence}`: {source}")]
    Oracle {
        sentence: String,
        #[source]
        source: TransformError,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqMode {
    /// Token-for-token equality.
    #[default]
    Exact,
    /// The target is an ordered subsequence of the prediction.
    Subsequence,
}

impl SeqMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SeqMode::Exact => "exact",
            SeqMode::Subsequence => "subsequence",
        }
    }
}

impl fmt::Display for SeqMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeqMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SeqMode::Exact),
            "subsequence" => Ok(SeqMode::Subsequence),
            other => Err(format!("unknown mode `{other}` (expected exact or subsequence)")),
        }
    }
}

pub fn sequence_match<S: AsRef<str>, T: AsRef<str>>(pred: &[S], target: &[T], mode: SeqMode) -> bool {
    match mode {
        SeqMode::Exact => pred.len() == target.len() && pred.iter().zip(target).all(|(p, t)| p.as_ref() == t.as_ref()),
        SeqMode::Subsequence => {
            let mut it = pred.iter();
            target.iter().all(|t| it.any(|p| p.as_ref() == t.as_ref()))
        }
    }
}

/// Index of the word whose identity reveals the rule: the fronted
/// auxiliary for questions, the fronted noun for passives.
pub fn diagnostic_index(task: Task) -> usize {
    match task {
        Task::Quest => 0,
        Task::Passiv => 1,
    }
}

fn token_equal<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T], i: usize) -> bool {
    match (a.get(i), b.get(i)) {
        (Some(x), Some(y)) => x.as_ref() == y.as_ref(),
        _ => false,
    }
}

fn positional_accuracy<S: AsRef<str>, T: AsRef<str>>(
    preds: &[Vec<S>],
    targets: &[Vec<T>],
    i: usize,
) -> Result<f64, EvalError> {
    if preds.len() != targets.len() {
        return Err(EvalError::LengthMismatch(preds.len(), targets.len()));
    }
    if preds.is_empty() {
        return Ok(0.0);
    }
    let short = preds.iter().filter(|p| p.len() <= i).count();
    if short > 0 {
        log::debug!("{short} predictions too short for position {i}; counted as misses");
    }
    let hits = preds.iter().zip(targets).filter(|(p, t)| token_equal(p, t, i)).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Fraction of predictions whose first word matches the target's.
pub fn main_aux_accuracy<S: AsRef<str>, T: AsRef<str>>(preds: &[Vec<S>], targets: &[Vec<T>]) -> Result<f64, EvalError> {
    positional_accuracy(preds, targets, 0)
}

/// Fraction of predictions whose second word matches the target's.
/// Predictions shorter than two tokens are misses.
pub fn object_noun_accuracy<S: AsRef<str>, T: AsRef<str>>(
    preds: &[Vec<S>],
    targets: &[Vec<T>],
) -> Result<f64, EvalError> {
    positional_accuracy(preds, targets, 1)
}

/// Parses a generated sentence, taking the first reading when several
/// readings exist (they agree on everything the oracles use).
pub(crate) fn source_tree<S: AsRef<str>>(grammar: &Grammar, source: &[S]) -> Result<SentenceTree, GrammarError> {
    match grammar.parse(source) {
        Err(GrammarError::Ambiguous { .. }) => Ok(grammar.parses(source)?.remove(0)),
        other => other,
    }
}

fn oracle<S: AsRef<str>>(grammar: &Grammar, source: &[S], rule: TransformRule) -> Result<Vec<String>, EvalError> {
    let sentence = || source.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
    let tree = source_tree(grammar, source)?;
    transform::apply(rule, grammar, &tree)
        .map(|r| r.output)
        .map_err(|e| EvalError::Oracle {
            sentence: sentence(),
            source: e,
        })
}

/// Fraction of predictions whose diagnostic word equals the linear rule's
/// diagnostic word on the same source.
pub fn linear_rule_frequency<S: AsRef<str> + Sync, T: AsRef<str> + Sync>(
    preds: &[Vec<S>],
    sources: &[Vec<T>],
    task: Task,
    grammar: &Grammar,
) -> Result<f64, EvalError> {
    if preds.len() != sources.len() {
        return Err(EvalError::LengthMismatch(preds.len(), sources.len()));
    }
    if preds.is_empty() {
        return Ok(0.0);
    }
    let i = diagnostic_index(task);
    let hits: Vec<bool> = preds
        .par_iter()
        .zip(sources)
        .map(|(p, s)| Ok(token_equal(p, &oracle(grammar, s, TransformRule::linear(task))?, i)))
        .collect::<Result<_, EvalError>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / preds.len() as f64)
}

/// Per-example indicators behind an [`EvalReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub identity: bool,
    pub exact: bool,
    pub subsequence: bool,
    pub diagnostic: bool,
    pub linear_diagnostic: bool,
    pub profile: Option<ErrorProfile>,
}

/// Aggregate scores of one prediction run on one split. Accuracy fields
/// cover the transformed examples; identity examples are reported apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub mode: SeqMode,
    pub checkpoint: Option<u64>,
    pub n: usize,
    /// Sequence accuracy under `mode`.
    pub sequence_acc: f64,
    pub exact_acc: f64,
    pub subsequence_acc: f64,
    pub main_aux_acc: Option<f64>,
    pub object_noun_acc: Option<f64>,
    pub move_first_freq: Option<f64>,
    pub move_second_freq: Option<f64>,
    pub identity_n: usize,
    pub identity_acc: Option<f64>,
    /// Number of transformed examples with each profile field true.
    pub profile_counts: BTreeMap<String, usize>,
    pub unaligned: usize,
}

impl EvalReport {
    /// Named metric values, in a fixed order.
    pub fn metrics(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("sequence_acc", self.sequence_acc),
            ("exact_acc", self.exact_acc),
            ("subsequence_acc", self.subsequence_acc),
        ];
        for (name, v) in [
            ("main_aux_acc", self.main_aux_acc),
            ("move_first_freq", self.move_first_freq),
            ("object_noun_acc", self.object_noun_acc),
            ("move_second_freq", self.move_second_freq),
            ("identity_acc", self.identity_acc),
        ] {
            if let Some(v) = v {
                out.push((name, v));
            }
        }
        out
    }

    /// Diagnostic-word accuracy of the task (main auxiliary or object noun).
    pub fn diagnostic_acc(&self) -> f64 {
        self.main_aux_acc.or(self.object_noun_acc).unwrap_or(0.0)
    }

    /// Linear-rule frequency of the task.
    pub fn linear_freq(&self) -> f64 {
        self.move_first_freq.or(self.move_second_freq).unwrap_or(0.0)
    }
}

/// Scores one prediction against its example.
pub fn score_example(
    grammar: &Grammar,
    task: Task,
    example: &TransformExample,
    pred: &[String],
    with_profile: bool,
) -> Result<ExampleScore, EvalError> {
    let identity = example.is_identity();
    let exact = sequence_match(pred, &example.target, SeqMode::Exact);
    let subsequence = sequence_match(pred, &example.target, SeqMode::Subsequence);
    if identity {
        return Ok(ExampleScore {
            identity,
            exact,
            subsequence,
            diagnostic: false,
            linear_diagnostic: false,
            profile: None,
        });
    }
    let i = diagnostic_index(task);
    let linear = oracle(grammar, &example.source, TransformRule::linear(task))?;
    let profile = if with_profile {
        let tree = source_tree(grammar, &example.source)?;
        Some(error_profile(grammar, &tree, pred).map_err(|e| EvalError::Oracle {
            sentence: example.source.join(" "),
            source: e,
        })?)
    } else {
        None
    };
    Ok(ExampleScore {
        identity,
        exact,
        subsequence,
        diagnostic: token_equal(pred, &example.target, i),
        linear_diagnostic: token_equal(pred, &linear, i),
        profile,
    })
}

fn mean(flags: impl Iterator<Item = bool>) -> Option<f64> {
    let (mut n, mut k) = (0usize, 0usize);
    for f in flags {
        n += 1;
        k += f as usize;
    }
    (n > 0).then(|| k as f64 / n as f64)
}

/// Aggregates per-example scores (in input order, so the result does not
/// depend on evaluation order).
pub fn aggregate(task: Task, mode: SeqMode, checkpoint: Option<u64>, scores: &[ExampleScore]) -> EvalReport {
    let transformed: Vec<&ExampleScore> = scores.iter().filter(|s| !s.identity).collect();
    let identity: Vec<&ExampleScore> = scores.iter().filter(|s| s.identity).collect();
    let exact_acc = mean(transformed.iter().map(|s| s.exact)).unwrap_or(0.0);
    let subsequence_acc = mean(transformed.iter().map(|s| s.subsequence)).unwrap_or(0.0);
    let diag = mean(transformed.iter().map(|s| s.diagnostic)).unwrap_or(0.0);
    let lin = mean(transformed.iter().map(|s| s.linear_diagnostic)).unwrap_or(0.0);
    let mut profile_counts = BTreeMap::new();
    let mut unaligned = 0;
    for s in &transformed {
        if let Some(p) = &s.profile {
            unaligned += p.unaligned() as usize;
            for (name, value) in p.fields() {
                *profile_counts.entry(name.to_string()).or_insert(0) += value as usize;
            }
        }
    }
    let (main_aux_acc, move_first_freq, object_noun_acc, move_second_freq) = match task {
        Task::Quest => (Some(diag), Some(lin), None, None),
        Task::Passiv => (None, None, Some(diag), Some(lin)),
    };
    EvalReport {
        task,
        mode,
        checkpoint,
        n: transformed.len(),
        sequence_acc: match mode {
            SeqMode::Exact => exact_acc,
            SeqMode::Subsequence => subsequence_acc,
        },
        exact_acc,
        subsequence_acc,
        main_aux_acc,
        object_noun_acc,
        move_first_freq,
        move_second_freq,
        identity_n: identity.len(),
        identity_acc: mean(identity.iter().map(|s| match mode {
            SeqMode::Exact => s.exact,
            SeqMode::Subsequence => s.subsequence,
        })),
        profile_counts,
        unaligned,
    }
}

/// Scores a whole split. `preds` must be aligned with `examples`.
pub fn evaluate(
    grammar: &Grammar,
    task: Task,
    examples: &[TransformExample],
    preds: &[Vec<String>],
    mode: SeqMode,
    checkpoint: Option<u64>,
) -> Result<EvalReport, EvalError> {
    if preds.len() != examples.len() {
        return Err(EvalError::LengthMismatch(preds.len(), examples.len()));
    }
    let scores: Vec<ExampleScore> = examples
        .par_iter()
        .zip(preds)
        .map(|(ex, p)| score_example(grammar, task, ex, p, true))
        .collect::<Result<_, _>>()?;
    Ok(aggregate(task, mode, checkpoint, &scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn sequence_modes() {
        let t = toks("have my yaks read ?");
        assert!(sequence_match(&t, &t, SeqMode::Exact));
        let longer = toks("have my yaks read ? ?");
        assert!(!sequence_match(&longer, &t, SeqMode::Exact));
        assert!(sequence_match(&longer, &t, SeqMode::Subsequence));
        assert!(!sequence_match(&toks("my have yaks read ?"), &t, SeqMode::Subsequence));
    }

    #[test]
    fn positional_metrics() {
        let preds = vec![toks("has a"), toks("x"), vec![]];
        let targets = vec![toks("has b"), toks("y"), toks("z")];
        assert!((main_aux_accuracy(&preds, &targets).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(object_noun_accuracy(&preds, &targets).unwrap(), 0.0);
        assert!(matches!(
            main_aux_accuracy(&preds[..1], &targets),
            Err(EvalError::LengthMismatch(1, 3))
        ));
    }
}
