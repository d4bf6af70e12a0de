//! Corpus mining for adjacent declarative/question pairs and the estimate
//! of how often a corpus contains a disambiguating example.

mod corpus;
mod rc;
mod segment;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{read_corpus, scan_corpus, write_pairs, Document, MineSummary};
pub use rc::{AnnotatedRcDetector, Detection, HeuristicRcDetector, RcDetector};
pub use segment::{NewlineSegmenter, RuleSegmenter, Segmenter};

#[derive(Debug, Error)]
pub enum MinerError {
    #[error("{what} denominator is zero")]
    ZeroDenominator { what: &'static str },
    #[error("{what} = {value} is not a probability")]
    NotAProbability { what: &'static str, value: f64 },
    #[error("invalid miner configuration: {0}")]
    Config(String),
    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

const AUXILIARIES: &[&str] = &[
    "has", "have", "had", "hasn't", "haven't", "hadn't", "is", "are", "was", "were", "isn't", "aren't", "wasn't",
    "weren't", "do", "does", "did", "don't", "doesn't", "didn't", "can", "can't", "could", "couldn't", "will", "won't",
    "would", "wouldn't", "should", "shouldn't", "may", "might", "must",
];

/// The English auxiliary list used by the pair criteria and the RC
/// heuristic.
pub fn default_auxiliaries() -> BTreeSet<String> {
    AUXILIARIES.iter().map(|s| s.to_string()).collect()
}

/// Lowercased words with surrounding punctuation stripped. Curly
/// apostrophes are folded to `'` so `hasn’t` matches `hasn't`.
pub fn word_tokens(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| {
            w.to_lowercase()
                .replace('\u{2019}', "'")
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JaccardMode {
    /// Sets of word types.
    #[default]
    Types,
    /// Multisets: summed minimum over summed maximum counts.
    Multiset,
}

impl FromStr for JaccardMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "types" => Ok(JaccardMode::Types),
            "multiset" => Ok(JaccardMode::Multiset),
            other => Err(format!("unknown jaccard mode `{other}` (expected types or multiset)")),
        }
    }
}

/// Jaccard similarity of two token sequences. Two empty sequences count as
/// identical.
pub fn jaccard<S: AsRef<str>>(a: &[S], b: &[S], mode: JaccardMode) -> f64 {
    if a.is_empty() && b.is_empty() {
        log::debug!("jaccard of two empty sentences taken as 1.0");
        return 1.0;
    }
    match mode {
        JaccardMode::Types => {
            let sa: BTreeSet<&str> = a.iter().map(AsRef::as_ref).collect();
            let sb: BTreeSet<&str> = b.iter().map(AsRef::as_ref).collect();
            let inter = sa.intersection(&sb).count();
            inter as f64 / (sa.len() + sb.len() - inter) as f64
        }
        JaccardMode::Multiset => {
            let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
            for t in a {
                counts.entry(t.as_ref()).or_default().0 += 1;
            }
            for t in b {
                counts.entry(t.as_ref()).or_default().1 += 1;
            }
            let (min, max) = counts
                .values()
                .fold((0, 0), |(lo, hi), &(x, y)| (lo + x.min(y), hi + x.max(y)));
            min as f64 / max as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerConfig {
    /// Pairs must be strictly more similar than this.
    pub jaccard_threshold: f64,
    pub jaccard_mode: JaccardMode,
    pub auxiliaries: BTreeSet<String>,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            jaccard_threshold: 0.7,
            jaccard_mode: JaccardMode::Types,
            auxiliaries: default_auxiliaries(),
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<(), MinerError> {
        if !(self.jaccard_threshold > 0.0 && self.jaccard_threshold <= 1.0) {
            return Err(MinerError::Config(format!(
                "jaccard threshold {} is outside (0, 1]",
                self.jaccard_threshold
            )));
        }
        if self.auxiliaries.is_empty() {
            return Err(MinerError::Config("auxiliary list is empty".into()));
        }
        Ok(())
    }

    fn distinct_auxiliaries(&self, tokens: &[String]) -> usize {
        tokens
            .iter()
            .filter(|t| self.auxiliaries.contains(*t))
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// Which sentence of a pair starts with an auxiliary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxInitial {
    A,
    B,
}

impl fmt::Display for AuxInitial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuxInitial::A => "a",
            AuxInitial::B => "b",
        })
    }
}

/// A pair of adjacent sentences meeting all three criteria. Candidates are
/// meant for manual review; they are not known to be true
/// declarative/question pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinedPair {
    pub doc_id: String,
    /// Index of `sent_a` in its document.
    pub sentence_index: usize,
    pub sent_a: Vec<String>,
    pub sent_b: Vec<String>,
    pub jaccard: f64,
    pub aux_initial: AuxInitial,
    pub distinct_aux_count_a: usize,
    pub distinct_aux_count_b: usize,
}

/// Applies the three pair criteria to two tokenized sentences.
pub fn check_pair(a: &[String], b: &[String], config: &MinerConfig) -> Option<(f64, AuxInitial, usize, usize)> {
    let starts = |s: &[String]| s.first().is_some_and(|t| config.auxiliaries.contains(t));
    let aux_initial = match (starts(a), starts(b)) {
        (true, false) => AuxInitial::A,
        (false, true) => AuxInitial::B,
        _ => return None,
    };
    let ca = config.distinct_auxiliaries(a);
    let cb = config.distinct_auxiliaries(b);
    if ca < 2 || cb < 2 {
        return None;
    }
    let j = jaccard(a, b, config.jaccard_mode);
    (j > config.jaccard_threshold).then_some((j, aux_initial, ca, cb))
}

/// Counts over one scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScanStats {
    pub documents: usize,
    pub sentences: usize,
    pub adjacent_pairs: usize,
    pub malformed: usize,
    /// Sentences the RC detector labelled as having an RC on the subject.
    pub rc_subject: usize,
    pub rc_uncertain: usize,
}

impl std::ops::AddAssign for ScanStats {
    fn add_assign(&mut self, o: Self) {
        self.documents += o.documents;
        self.sentences += o.sentences;
        self.adjacent_pairs += o.adjacent_pairs;
        self.malformed += o.malformed;
        self.rc_subject += o.rc_subject;
        self.rc_uncertain += o.rc_uncertain;
    }
}

fn scan_document(
    doc: &Document,
    config: &MinerConfig,
    segmenter: &dyn Segmenter,
    rc: Option<&dyn RcDetector>,
) -> (Vec<MinedPair>, ScanStats) {
    let sentences: Vec<Vec<String>> = segmenter.segment(&doc.text).iter().map(|s| word_tokens(s)).collect();
    let mut stats = ScanStats {
        documents: 1,
        sentences: sentences.len(),
        adjacent_pairs: sentences.len().saturating_sub(1),
        ..Default::default()
    };
    if let Some(rc) = rc {
        for s in &sentences {
            match rc.detect(s) {
                Detection::RcOnSubject => stats.rc_subject += 1,
                Detection::Uncertain => stats.rc_uncertain += 1,
                Detection::NoRc => {}
            }
        }
    }
    let pairs = sentences
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            check_pair(&w[0], &w[1], config).map(|(jaccard, aux_initial, ca, cb)| MinedPair {
                doc_id: doc.id.clone(),
                sentence_index: i,
                sent_a: w[0].clone(),
                sent_b: w[1].clone(),
                jaccard,
                aux_initial,
                distinct_aux_count_a: ca,
                distinct_aux_count_b: cb,
            })
        })
        .collect();
    (pairs, stats)
}

/// Sorts pairs into the canonical output order.
pub(crate) fn sort_pairs(pairs: &mut [MinedPair]) {
    pairs.sort_by(|x, y| {
        (&x.doc_id, x.sentence_index, &x.sent_a, &x.sent_b).cmp(&(&y.doc_id, y.sentence_index, &y.sent_a, &y.sent_b))
    });
}

/// Scans documents in parallel. Output is sorted by document id and
/// sentence index, so it does not depend on input order or thread count.
pub fn scan_pairs(
    docs: &[Document],
    config: &MinerConfig,
    segmenter: &dyn Segmenter,
    rc: Option<&dyn RcDetector>,
) -> (Vec<MinedPair>, ScanStats) {
    let (mut pairs, stats) = docs
        .par_iter()
        .map(|d| scan_document(d, config, segmenter, rc))
        .reduce(
            || (Vec::new(), ScanStats::default()),
            |(mut pa, mut sa), (pb, sb)| {
                pa.extend(pb);
                sa += sb;
                (pa, sa)
            },
        );
    sort_pairs(&mut pairs);
    (pairs, stats)
}

/// Expected number of disambiguating examples in a corpus of
/// `n_sentences` sentences, assuming pairs and subject RCs are independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisambiguationEstimate {
    pub p_pair: f64,
    pub p_rc_subject: f64,
    pub n_sentences: f64,
    pub expected_disambiguating: f64,
}

impl DisambiguationEstimate {
    pub fn from_probabilities(p_pair: f64, p_rc_subject: f64, n_sentences: f64) -> Result<Self, MinerError> {
        for (what, value) in [("p_pair", p_pair), ("p_rc_subject", p_rc_subject)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(MinerError::NotAProbability { what, value });
            }
        }
        Ok(DisambiguationEstimate {
            p_pair,
            p_rc_subject,
            n_sentences,
            expected_disambiguating: n_sentences * p_pair * p_rc_subject,
        })
    }

    /// Probability that a sentence pair is a disambiguating example.
    pub fn product(&self) -> f64 {
        self.p_pair * self.p_rc_subject
    }
}

/// Builds the estimate from raw counts.
pub fn estimate(
    pair_count: u64,
    pair_denominator: u64,
    rc_count: u64,
    rc_denominator: u64,
    n_sentences: f64,
) -> Result<DisambiguationEstimate, MinerError> {
    if pair_denominator == 0 {
        return Err(MinerError::ZeroDenominator { what: "pair" });
    }
    if rc_denominator == 0 {
        return Err(MinerError::ZeroDenominator { what: "rc" });
    }
    DisambiguationEstimate::from_probabilities(
        pair_count as f64 / pair_denominator as f64,
        rc_count as f64 / rc_denominator as f64,
        n_sentences,
    )
}
