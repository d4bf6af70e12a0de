//! Detection of relative clauses on the subject.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;

use super::MinerError;

/// Outcome of a detector on one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    RcOnSubject,
    NoRc,
    /// The detector cannot tell; counted as a negative.
    Uncertain,
}

impl Detection {
    pub fn is_rc(self) -> bool {
        self == Detection::RcOnSubject
    }
}

pub trait RcDetector: Send + Sync {
    /// `tokens` are lowercased words as produced by
    /// [`word_tokens`](super::word_tokens).
    fn detect(&self, tokens: &[String]) -> Detection;

    fn name(&self) -> &'static str;
}

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our", "their", "some", "any",
    "every", "each", "no", "many", "few", "several", "all", "both",
];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "with", "from", "to", "for", "about", "above", "below", "behind", "upon", "under",
    "near", "beside", "between", "into", "over",
];

const RELATIVE_PRONOUNS: &[&str] = &["that", "who", "which", "whom", "whose"];

/// Surface heuristic: a relative pronoun follows a noun-like word inside
/// the subject region, which runs from the start of the sentence (after a
/// fronted auxiliary) to the first auxiliary or `-ed` verb. The sentence
/// must contain an auxiliary.
#[derive(Debug, Clone)]
pub struct HeuristicRcDetector {
    auxiliaries: BTreeSet<String>,
}

impl HeuristicRcDetector {
    pub fn new(auxiliaries: BTreeSet<String>) -> Self {
        HeuristicRcDetector { auxiliaries }
    }

    fn is_aux(&self, t: &str) -> bool {
        self.auxiliaries.contains(t)
    }
}

fn is_det(t: &str) -> bool {
    DETERMINERS.contains(&t)
}

impl RcDetector for HeuristicRcDetector {
    fn detect(&self, tokens: &[String]) -> Detection {
        if !tokens.iter().any(|t| self.is_aux(t)) {
            return Detection::NoRc;
        }
        let start = usize::from(tokens.first().is_some_and(|t| self.is_aux(t)));
        let mut seen_noun = false;
        let mut seen_det = false;
        for (i, t) in tokens.iter().enumerate().skip(start) {
            let t = t.as_str();
            if RELATIVE_PRONOUNS.contains(&t) && seen_noun {
                let prev = tokens[i - 1].as_str();
                if is_det(prev) || PREPOSITIONS.contains(&prev) {
                    return Detection::NoRc;
                }
                // "said that" and the like: no determiner opened an NP.
                if t == "that" && !seen_det {
                    return Detection::Uncertain;
                }
                return Detection::RcOnSubject;
            }
            if self.is_aux(t) {
                return Detection::NoRc;
            }
            let verb_like = t.len() > 3 && t.ends_with("ed") && !(i > 0 && is_det(&tokens[i - 1]));
            if verb_like && seen_noun {
                return Detection::NoRc;
            }
            if is_det(t) {
                seen_det = true;
            } else if !PREPOSITIONS.contains(&t) {
                seen_noun = true;
            }
        }
        Detection::NoRc
    }

    fn name(&self) -> &'static str {
        "heuristic"
    }
}

/// Labels taken from dependency parses in CoNLL-U form. A sentence has an
/// RC on the subject when a subject dependent of the root heads a
/// relative-clause dependent (`acl:relcl` or `relcl`) and some token is
/// tagged `AUX`. Sentences absent from the annotation are uncertain.
#[derive(Debug, Clone, Default)]
pub struct AnnotatedRcDetector {
    labels: HashMap<Vec<String>, bool>,
}

struct Row {
    id: usize,
    form: String,
    upos: String,
    head: usize,
    deprel: String,
}

fn label_sentence(rows: &[Row]) -> bool {
    let has_aux = rows.iter().any(|r| r.upos == "AUX");
    let root = rows.iter().find(|r| r.head == 0).map(|r| r.id);
    let subjects: Vec<usize> = rows
        .iter()
        .filter(|r| Some(r.head) == root && r.deprel.starts_with("nsubj"))
        .map(|r| r.id)
        .collect();
    has_aux
        && rows
            .iter()
            .any(|r| (r.deprel == "acl:relcl" || r.deprel == "relcl") && subjects.contains(&r.head))
}

impl AnnotatedRcDetector {
    /// Reads CoNLL-U. Multiword-token and empty-node lines are skipped.
    pub fn from_conllu<R: BufRead>(reader: R) -> Result<Self, MinerError> {
        let mut labels = HashMap::new();
        let mut rows: Vec<Row> = Vec::new();
        let mut flush = |rows: &mut Vec<Row>| {
            if !rows.is_empty() {
                let key = rows.iter().map(|r| r.form.to_lowercase()).collect::<Vec<_>>();
                let key = super::word_tokens(&key.join(" "));
                labels.insert(key, label_sentence(rows));
                rows.clear();
            }
        };
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| MinerError::Annotation {
                line: n + 1,
                message: e.to_string(),
            })?;
            let line = line.trim_end();
            if line.is_empty() {
                flush(&mut rows);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = |message: String| MinerError::Annotation { line: n + 1, message };
            if cols.len() < 8 {
                return Err(bad(format!("expected 10 columns, found {}", cols.len())));
            }
            if cols[0].contains('-') || cols[0].contains('.') {
                continue;
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad index `{s}`")));
            rows.push(Row {
                id: num(cols[0])?,
                form: cols[1].to_string(),
                upos: cols[3].to_string(),
                head: num(cols[6])?,
                deprel: cols[7].to_string(),
            });
        }
        flush(&mut rows);
        Ok(AnnotatedRcDetector { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl RcDetector for AnnotatedRcDetector {
    fn detect(&self, tokens: &[String]) -> Detection {
        match self.labels.get(tokens) {
            Some(true) => Detection::RcOnSubject,
            Some(false) => Detection::NoRc,
            None => Detection::Uncertain,
        }
    }

    fn name(&self) -> &'static str {
        "annotated"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::{default_auxiliaries, word_tokens};

    fn detect(s: &str) -> Detection {
        HeuristicRcDetector::new(default_auxiliaries()).detect(&word_tokens(s))
    }

    #[test]
    fn heuristic_examples() {
        assert!(detect("the yak that your unicorns have amused hasn't entertained a newt .").is_rc());
        assert_eq!(detect("some xylophones have remembered my yak ."), Detection::NoRc);
        assert!(detect("Has this company which hasn't had any legal violations been reported?").is_rc());
        assert_eq!(detect("my yak has amused the newt that your unicorns have seen ."), Detection::NoRc);
        assert_eq!(detect("my yaks below the unicorns have eaten ."), Detection::NoRc);
        assert_eq!(detect("the dog that barked ran away ."), Detection::NoRc);
        assert_eq!(detect("He said that it has rained."), Detection::Uncertain);
    }

    #[test]
    fn conllu_labels() {
        let text = "\
# text = The dog that has barked is sleeping.
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\t_\t_\t7\tnsubj\t_\t_
3\tthat\tthat\tPRON\t_\t_\t5\tnsubj\t_\t_
4\thas\thave\tAUX\t_\t_\t5\taux\t_\t_
5\tbarked\tbark\tVERB\t_\t_\t2\tacl:relcl\t_\t_
6\tis\tbe\tAUX\t_\t_\t7\taux\t_\t_
7\tsleeping\tsleep\tVERB\t_\t_\t0\troot\t_\t_
8\t.\t.\tPUNCT\t_\t_\t7\tpunct\t_\t_

1\tDogs\tdog\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tbark\tbark\tVERB\t_\t_\t0\troot\t_\t_
";
        let d = AnnotatedRcDetector::from_conllu(text.as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.detect(&word_tokens("The dog that has barked is sleeping.")).is_rc());
        assert_eq!(d.detect(&word_tokens("Dogs bark")), Detection::NoRc);
        assert_eq!(d.detect(&word_tokens("Cats sleep")), Detection::Uncertain);
        assert!(AnnotatedRcDetector::from_conllu("1\tx\n".as_bytes()).is_err());
    }
}
