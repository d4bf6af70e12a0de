//! Fine-grained error profiles of a single prediction.

use serde::{Deserialize, Serialize};

use crate::features::{Category, Language};
use crate::grammar::{Grammar, ModifierKind, SentenceTree, Task};
use crate::lexicon::{LexicalEntry, Lexicon};
use crate::transform::{self, TransformError};

/// Question-formation profile. `main_aux_fronted` and
/// `original_aux_deleted` are successes; `wrong_polarity_aux_fronted` and
/// `rc_dropped` are errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuestErrorProfile {
    pub main_aux_fronted: bool,
    pub original_aux_deleted: bool,
    /// An auxiliary other than the matrix one was fronted.
    pub wrong_polarity_aux_fronted: bool,
    pub rc_dropped: bool,
    pub unaligned: bool,
}

impl QuestErrorProfile {
    /// True when no error was detected.
    pub fn all_correct(&self) -> bool {
        !self.unaligned
            && self.main_aux_fronted
            && self.original_aux_deleted
            && !self.wrong_polarity_aux_fronted
            && !self.rc_dropped
    }
}

/// Passivization profile; every field is a success indicator. Case fields
/// are `None` for English.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PassivErrorProfile {
    pub object_np_moved: bool,
    pub subject_in_by_phrase: bool,
    pub pp_on_second_np_preserved: bool,
    pub first_np_case_reinflected: Option<bool>,
    pub second_np_case_reinflected: Option<bool>,
    pub tense_reinflected: bool,
    pub passive_aux_inserted_inflected: bool,
    pub unaligned: bool,
}

impl PassivErrorProfile {
    pub fn all_correct(&self) -> bool {
        !self.unaligned
            && self.object_np_moved
            && self.subject_in_by_phrase
            && self.pp_on_second_np_preserved
            && self.first_np_case_reinflected.unwrap_or(true)
            && self.second_np_case_reinflected.unwrap_or(true)
            && self.tense_reinflected
            && self.passive_aux_inserted_inflected
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum ErrorProfile {
    Quest(QuestErrorProfile),
    Passiv(PassivErrorProfile),
}

impl ErrorProfile {
    pub fn unaligned(&self) -> bool {
        match self {
            ErrorProfile::Quest(p) => p.unaligned,
            ErrorProfile::Passiv(p) => p.unaligned,
        }
    }

    pub fn all_correct(&self) -> bool {
        match self {
            ErrorProfile::Quest(p) => p.all_correct(),
            ErrorProfile::Passiv(p) => p.all_correct(),
        }
    }

    /// Field names and values; language-inapplicable fields are omitted.
    pub fn fields(&self) -> Vec<(&'static str, bool)> {
        match self {
            ErrorProfile::Quest(p) => vec![
                ("main_aux_fronted", p.main_aux_fronted),
                ("original_aux_deleted", p.original_aux_deleted),
                ("wrong_polarity_aux_fronted", p.wrong_polarity_aux_fronted),
                ("rc_dropped", p.rc_dropped),
            ],
            ErrorProfile::Passiv(p) => {
                let mut v = vec![
                    ("object_np_moved", p.object_np_moved),
                    ("subject_in_by_phrase", p.subject_in_by_phrase),
                    ("pp_on_second_np_preserved", p.pp_on_second_np_preserved),
                ];
                if let Some(x) = p.first_np_case_reinflected {
                    v.push(("first_np_case_reinflected", x));
                }
                if let Some(x) = p.second_np_case_reinflected {
                    v.push(("second_np_case_reinflected", x));
                }
                v.push(("tense_reinflected", p.tense_reinflected));
                v.push(("passive_aux_inserted_inflected", p.passive_aux_inserted_inflected));
                v
            }
        }
    }
}

fn is_subsequence(hay: &[String], needle: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// Whether `tokens` is some inflection of the determiner and noun lemmas of
/// `det` and `noun`.
fn same_np(lexicon: &Lexicon, tokens: &[String], det: &LexicalEntry, noun: &LexicalEntry) -> bool {
    let reads_as = |tok: &String, e: &LexicalEntry| {
        lexicon.by_surface(tok).iter().any(|&i| {
            let x = lexicon.entry(i);
            x.category == e.category && x.lemma == e.lemma
        })
    };
    tokens.len() == 2 && reads_as(&tokens[0], det) && reads_as(&tokens[1], noun)
}

fn leaf_entry(tree: &SentenceTree, i: usize) -> Option<&LexicalEntry> {
    tree.leaves().get(i)?.entry.as_ref()
}

/// Profile of `pred` against the hierarchical transformation of `tree`.
pub fn error_profile(grammar: &Grammar, tree: &SentenceTree, pred: &[String]) -> Result<ErrorProfile, TransformError> {
    let task = tree.structure().task;
    let target = match task {
        Task::Quest => transform::quest_hierarchical(tree)?,
        Task::Passiv => transform::passiv_hierarchical(grammar, tree)?,
    };
    let unaligned = pred.is_empty() || !pred.iter().any(|p| target.output.contains(p));
    if unaligned {
        return Ok(match task {
            Task::Quest => ErrorProfile::Quest(QuestErrorProfile {
                unaligned: true,
                ..Default::default()
            }),
            Task::Passiv => ErrorProfile::Passiv(PassivErrorProfile {
                unaligned: true,
                ..Default::default()
            }),
        });
    }
    let lexicon = grammar.lexicon();
    match task {
        Task::Quest => {
            let tokens = tree.tokens();
            let aux = &tokens[tree.matrix_aux().expect("quest trees have a matrix auxiliary")];
            let count = |seq: &[String]| seq.iter().filter(|t| *t == aux).count();
            let rc_tokens: Option<Vec<String>> = tree.modifier().and_then(|(span, _)| {
                (tree.structure().modifier_kind == ModifierKind::Rc).then(|| {
                    span.filter(|&i| {
                        !leaf_entry(tree, i).is_some_and(|e| e.category.is_auxiliary()) && tokens[i] != ","
                    })
                    .map(|i| tokens[i].clone())
                    .collect()
                })
            });
            Ok(ErrorProfile::Quest(QuestErrorProfile {
                main_aux_fronted: pred.first() == target.output.first(),
                original_aux_deleted: count(pred) <= count(&target.output),
                wrong_polarity_aux_fronted: pred.first().is_some_and(|p| lexicon.is_auxiliary(p))
                    && pred.first() != target.output.first(),
                rc_dropped: rc_tokens.is_some_and(|rc| !is_subsequence(pred, &rc)),
                unaligned: false,
            }))
        }
        Task::Passiv => {
            let lm = target.landmarks.expect("passives carry landmarks");
            let german = grammar.language() == Language::De;
            let subject = tree.subject();
            let object = tree.object().expect("passiv trees have an object");
            let entries = |start: usize| (leaf_entry(tree, start), leaf_entry(tree, start + 1));
            let np_at = |at: usize, start: usize| match (pred.get(at..at + 2), entries(start)) {
                (Some(toks), (Some(d), Some(n))) if d.category == Category::Det => same_np(lexicon, toks, d, n),
                _ => false,
            };
            let marker = pred.iter().position(|t| *t == lm.agent_marker);
            let after_marker = |len: usize| marker.and_then(|m| pred.get(m + 1..m + 1 + len));
            let agent_pp = &lm.agent[2..];
            Ok(ErrorProfile::Passiv(PassivErrorProfile {
                object_np_moved: np_at(0, object.start),
                subject_in_by_phrase: marker.is_some_and(|m| np_at(m + 1, subject.start)),
                pp_on_second_np_preserved: agent_pp.is_empty()
                    || marker.is_some_and(|m| pred.get(m + 3..m + 3 + agent_pp.len()) == Some(agent_pp)),
                first_np_case_reinflected: german.then(|| pred.get(..2) == Some(&lm.fronted_head[..])),
                second_np_case_reinflected: german.then(|| after_marker(2) == Some(&lm.agent_head[..])),
                tense_reinflected: pred.contains(&lm.participle),
                passive_aux_inserted_inflected: pred.contains(&lm.passive_aux),
                unaligned: false,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn passive_pp_dropped() {
        let g = Grammar::builtin(Language::En);
        let tree = g
            .parse(&toks("my yaks below the unicorns comforted the orangutans ."))
            .unwrap();
        let p = error_profile(g, &tree, &toks("the orangutans were comforted by my yaks .")).unwrap();
        let ErrorProfile::Passiv(p) = p else { panic!() };
        assert!(!p.pp_on_second_np_preserved);
        assert!(p.object_np_moved && p.subject_in_by_phrase && p.tense_reinflected && p.passive_aux_inserted_inflected);
        assert_eq!(p.first_np_case_reinflected, None);
    }

    #[test]
    fn quest_aux_not_deleted() {
        let g = Grammar::builtin(Language::En);
        let tree = g
            .parse(&toks("my unicorn that hasn't amused the yaks has eaten ."))
            .unwrap();
        let p = error_profile(g, &tree, &toks("has my unicorn that hasn't amused the yaks has eaten ?")).unwrap();
        let ErrorProfile::Quest(q) = p else { panic!() };
        assert!(q.main_aux_fronted);
        assert!(!q.original_aux_deleted);
        assert!(!q.rc_dropped && !q.wrong_polarity_aux_fronted);
        let lin = error_profile(g, &tree, &toks("hasn't my unicorn that amused the yaks has eaten ?")).unwrap();
        let ErrorProfile::Quest(q) = lin else { panic!() };
        assert!(q.wrong_polarity_aux_fronted && !q.main_aux_fronted);
    }

    #[test]
    fn unaligned_predictions() {
        let g = Grammar::builtin(Language::En);
        let tree = g.parse(&toks("your quails amused some vulture .")).unwrap();
        assert!(error_profile(g, &tree, &[]).unwrap().unaligned());
        assert!(error_profile(g, &tree, &toks("xyzzy")).unwrap().unaligned());
    }

    #[test]
    fn german_case_fields() {
        let g = Grammar::builtin(Language::De);
        let tree = g.parse(&toks("ihr esel unterhielt meinen salamander .")).unwrap();
        let ok = error_profile(g, &tree, &toks("mein salamander wurde von ihrem esel unterhalten .")).unwrap();
        assert!(ok.all_correct());
        let bad = error_profile(g, &tree, &toks("meinen salamander wurde von ihr esel unterhalten .")).unwrap();
        let ErrorProfile::Passiv(p) = bad else { panic!() };
        assert!(p.object_np_moved && p.subject_in_by_phrase);
        assert_eq!(p.first_np_case_reinflected, Some(false));
        assert_eq!(p.second_np_case_reinflected, Some(false));
    }
}
