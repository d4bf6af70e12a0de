//! Prediction files and their alignment with a split.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::dataset::TransformExample;
use crate::features::Category;
use crate::lexicon::Lexicon;
use crate::tokenize;

use super::EvalError;

/// One line of a prediction file. Files hold either the prediction alone or
/// `source<TAB>prediction`; the source may carry the task prefix or marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionLine {
    pub source: Option<Vec<String>>,
    pub prediction: Vec<String>,
}

/// Reads and normalizes a prediction file.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionLine>, EvalError> {
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text
        .lines()
        .map(|line| match line.split_once('\t') {
            Some((src, pred)) => PredictionLine {
                source: Some(tokenize::normalize(src)),
                prediction: tokenize::normalize(pred),
            },
            None => PredictionLine {
                source: None,
                prediction: tokenize::normalize(line),
            },
        })
        .collect())
}

fn strip_task_tag<'a>(source: &'a [String], example: &TransformExample) -> &'a [String] {
    let prefix = example.task.prefix();
    let marker = example.task.as_str();
    if source.first().is_some_and(|t| *t == prefix) {
        &source[1..]
    } else if source.last().is_some_and(|t| *t == marker) {
        &source[..source.len() - 1]
    } else {
        source
    }
}

fn nouns<'a>(tokens: &'a [String], lexicon: &Lexicon) -> HashSet<&'a str> {
    tokens
        .iter()
        .filter(|t| lexicon.has_category(t, Category::Noun))
        .map(String::as_str)
        .collect()
}

/// Checks that `preds` line up with `examples`. Lines carrying a source
/// must match it exactly. For prediction-only files, a file where most
/// noun-bearing predictions share no noun with their source is rejected.
pub fn check_alignment(
    examples: &[TransformExample],
    preds: &[PredictionLine],
    lexicon: &Lexicon,
) -> Result<(), EvalError> {
    if examples.len() != preds.len() {
        return Err(EvalError::Alignment {
            line: examples.len().min(preds.len()) + 1,
            message: format!("{} predictions for {} examples", preds.len(), examples.len()),
        });
    }
    let mut checked = 0usize;
    let mut disjoint = Vec::new();
    for (i, (ex, p)) in examples.iter().zip(preds).enumerate() {
        if let Some(src) = &p.source {
            if strip_task_tag(src, ex) != ex.source.as_slice() {
                return Err(EvalError::Alignment {
                    line: i + 1,
                    message: format!("source `{}` does not match `{}`", src.join(" "), ex.source.join(" ")),
                });
            }
            continue;
        }
        let pn = nouns(&p.prediction, lexicon);
        if pn.is_empty() {
            continue;
        }
        checked += 1;
        if pn.is_disjoint(&nouns(&ex.source, lexicon)) {
            disjoint.push(i + 1);
        }
    }
    if checked > 0 && disjoint.len() * 2 > checked {
        return Err(EvalError::Alignment {
            line: disjoint[0],
            message: format!(
                "{} of {checked} predictions share no noun with their source; the file looks misaligned",
                disjoint.len()
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_splits, DatasetConfig, SplitCounts};
    use crate::features::Language;
    use crate::grammar::{Grammar, Task};

    fn line(pred: &[String]) -> PredictionLine {
        PredictionLine {
            source: None,
            prediction: pred.to_vec(),
        }
    }

    #[test]
    fn shuffled_predictions_are_rejected() {
        let g = Grammar::builtin(Language::En);
        let mut config = DatasetConfig::new(Language::En, Task::Quest, 3);
        config.counts = SplitCounts {
            train: 10,
            dev: 10,
            test: 10,
            gen: 200,
        };
        let m = build_splits(g, &config).unwrap();
        let gen = m.split("gen").unwrap();
        let aligned: Vec<_> = gen.iter().map(|e| line(&e.target)).collect();
        check_alignment(gen, &aligned, g.lexicon()).unwrap();
        let mut shuffled = aligned.clone();
        shuffled.rotate_left(1);
        assert!(matches!(
            check_alignment(gen, &shuffled, g.lexicon()),
            Err(EvalError::Alignment { .. })
        ));
        assert!(matches!(
            check_alignment(gen, &aligned[1..], g.lexicon()),
            Err(EvalError::Alignment { line: 200, .. })
        ));
        let mut two_col: Vec<_> = gen
            .iter()
            .map(|e| PredictionLine {
                source: Some([vec!["quest:".to_string()], e.source.clone()].concat()),
                prediction: e.target.clone(),
            })
            .collect();
        check_alignment(gen, &two_col, g.lexicon()).unwrap();
        two_col.swap(3, 4);
        assert!(matches!(
            check_alignment(gen, &two_col, g.lexicon()),
            Err(EvalError::Alignment { line: 4, .. })
        ));
    }
}
