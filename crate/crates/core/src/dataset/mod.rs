//! Train/dev/test/generalization splits for one (language, task), their
//! serialization, and cross-lingual composition of several builds.

mod compose;
mod io;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::Language;
use crate::grammar::{Grammar, GrammarError, Modifier, StructureSpec, Task};
use crate::seed::derive_seed;
use crate::transform::{self, TransformError, TransformRule};

pub use compose::{compose_crosslingual, Recipe, RecipeSlice};
pub use io::{format_line, parse_line, read_manifest, read_metadata, read_split, write_manifest, write_split, Format, Metadata, SplitInfo};

/// Task label of a single example. `Decl` marks identity examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleTask {
    Quest,
    Passiv,
    Decl,
}

impl ExampleTask {
    pub const ALL: [ExampleTask; 3] = [ExampleTask::Quest, ExampleTask::Passiv, ExampleTask::Decl];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleTask::Quest => "quest",
            ExampleTask::Passiv => "passiv",
            ExampleTask::Decl => "decl",
        }
    }

    /// Source prefix token for the prefix-first format (`quest:`).
    pub fn prefix(self) -> String {
        format!("{}:", self.as_str())
    }

    pub fn transformation(self) -> Option<Task> {
        match self {
            ExampleTask::Quest => Some(Task::Quest),
            ExampleTask::Passiv => Some(Task::Passiv),
            ExampleTask::Decl => None,
        }
    }
}

impl From<Task> for ExampleTask {
    fn from(task: Task) -> Self {
        match task {
            Task::Quest => ExampleTask::Quest,
            Task::Passiv => ExampleTask::Passiv,
        }
    }
}

impl fmt::Display for ExampleTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExampleTask::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown task `{s}` (expected quest, passiv or decl)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformExample {
    pub task: ExampleTask,
    pub language: Language,
    pub structure: StructureSpec,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl TransformExample {
    pub fn is_identity(&self) -> bool {
        self.task == ExampleTask::Decl
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub gen: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        SplitCounts {
            train: 100_000,
            dev: 1_000,
            test: 10_000,
            gen: 10_000,
        }
    }
}

impl SplitCounts {
    pub fn get(&self, split: &str) -> Option<usize> {
        match split {
            "train" => Some(self.train),
            "dev" => Some(self.dev),
            "test" => Some(self.test),
            "gen" => Some(self.gen),
            _ => None,
        }
    }
}

/// Names of the four splits of a single build, in generation order.
pub const SPLITS: [&str; 4] = ["train", "dev", "test", "gen"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub language: Language,
    pub task: Task,
    pub counts: SplitCounts,
    pub seed: u64,
    /// Fraction of identity (`decl`) examples in train, dev and test.
    pub identity_fraction: f64,
    /// Reject repeated source sentences within a split. Sentences are
    /// always kept disjoint across splits.
    pub dedup: bool,
}

impl DatasetConfig {
    pub fn new(language: Language, task: Task, seed: u64) -> Self {
        DatasetConfig {
            language,
            task,
            counts: SplitCounts::default(),
            seed,
            identity_fraction: 0.5,
            dedup: true,
        }
    }
}

/// How a manifest came about; serialized into `metadata.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifestConfig {
    Built(DatasetConfig),
    Composed {
        recipe: Recipe,
        seed: u64,
        sources: Vec<DatasetConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: ManifestConfig,
    pub splits: BTreeMap<String, Vec<TransformExample>>,
}

impl DatasetManifest {
    pub fn split(&self, name: &str) -> Option<&[TransformExample]> {
        self.splits.get(name).map(Vec::as_slice)
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("insufficient lexicon: split {split} needs {requested} distinct sentences, only {produced} generated before {attempts} consecutive duplicates")]
    InsufficientLexicon {
        split: String,
        requested: usize,
        produced: usize,
        attempts: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dataset invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format { path: PathBuf, line: usize, message: String },
    #[error("recipe: {0}")]
    Recipe(String),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Which modifier placements a slot may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    /// All three placements (identity examples).
    Any,
    /// No modifier or modifier on the object: both rules agree.
    Ambiguous,
    /// Modifier on the subject: the rules diverge.
    Disambiguating,
}

impl Placement {
    fn modifiers(self) -> &'static [Modifier] {
        match self {
            Placement::Any => &Modifier::ALL,
            Placement::Ambiguous => &[Modifier::None, Modifier::OnObject],
            Placement::Disambiguating => &[Modifier::OnSubject],
        }
    }
}

/// Picks a structure: uniform over modifier placement, then over
/// transitivity, then over gap type.
fn sample_spec(task: Task, placement: Placement, rng: &mut impl Rng) -> StructureSpec {
    let modifier = *placement.modifiers().choose(rng).expect("non-empty");
    let specs: Vec<StructureSpec> = StructureSpec::all(task)
        .into_iter()
        .filter(|s| s.modifier == modifier)
        .collect();
    let mut transitivities: Vec<_> = specs.iter().map(|s| s.transitivity).collect();
    transitivities.dedup();
    let t = *transitivities.choose(rng).expect("non-empty");
    let gaps: Vec<StructureSpec> = specs.into_iter().filter(|s| s.transitivity == t).collect();
    *gaps.choose(rng).expect("non-empty")
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    identity: bool,
    placement: Placement,
}

fn plan(split: &str, n: usize, identity_fraction: f64) -> Vec<Slot> {
    if split == "gen" {
        return vec![
            Slot {
                identity: false,
                placement: Placement::Disambiguating,
            };
            n
        ];
    }
    let n_identity = (n as f64 * identity_fraction).round() as usize;
    (0..n)
        .map(|i| {
            if i < n_identity {
                Slot {
                    identity: true,
                    placement: Placement::Any,
                }
            } else {
                Slot {
                    identity: false,
                    placement: Placement::Ambiguous,
                }
            }
        })
        .collect()
}

const CHUNK: usize = 4096;
const MAX_DUPLICATES: usize = 1000;

fn candidate(
    grammar: &Grammar,
    config: &DatasetConfig,
    split_id: u64,
    slot_index: usize,
    slot: Slot,
    attempt: usize,
) -> Result<TransformExample, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[config.seed, split_id, slot_index as u64, attempt as u64]));
    let spec = sample_spec(config.task, slot.placement, &mut rng);
    let tree = grammar.sample_sentence(&spec, rng.gen())?;
    let source = tree.tokens();
    let (task, target) = if slot.identity {
        (ExampleTask::Decl, source.clone())
    } else {
        let rule = TransformRule::hierarchical(config.task);
        (config.task.into(), transform::apply(rule, grammar, &tree)?.output)
    };
    Ok(TransformExample {
        task,
        language: grammar.language(),
        structure: spec,
        source,
        target,
    })
}

/// Builds the four splits. Deterministic in `config` regardless of the
/// number of worker threads.
pub fn build_splits(grammar: &Grammar, config: &DatasetConfig) -> Result<DatasetManifest, DatasetError> {
    if grammar.language() != config.language {
        return Err(DatasetError::Config(format!(
            "grammar is {} but the configuration asks for {}",
            grammar.language(),
            config.language
        )));
    }
    if !(0.0..=1.0).contains(&config.identity_fraction) {
        return Err(DatasetError::Config("identity_fraction must lie in [0, 1]".into()));
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut splits = BTreeMap::new();
    for (split_id, split) in SPLITS.iter().enumerate() {
        let n = config.counts.get(split).expect("known split");
        if n == 0 {
            return Err(DatasetError::Config(format!("split {split} must be non-empty")));
        }
        let slots = plan(split, n, config.identity_fraction);
        let mut within: HashSet<String> = HashSet::new();
        let mut examples = Vec::with_capacity(n);
        for (chunk_id, chunk) in slots.chunks(CHUNK).enumerate() {
            let base = chunk_id * CHUNK;
            let first: Vec<Result<TransformExample, DatasetError>> = chunk
                .par_iter()
                .enumerate()
                .map(|(k, slot)| candidate(grammar, config, split_id as u64, base + k, *slot, 0))
                .collect();
            for (k, cand) in first.into_iter().enumerate() {
                let mut ex = cand?;
                let mut attempt = 0;
                loop {
                    let key = ex.source.join(" ");
                    let clash = seen.contains(&key) || (config.dedup && within.contains(&key));
                    if !clash {
                        within.insert(key);
                        break;
                    }
                    attempt += 1;
                    if attempt > MAX_DUPLICATES {
                        return Err(DatasetError::InsufficientLexicon {
                            split: split.to_string(),
                            requested: n,
                            produced: examples.len(),
                            attempts: MAX_DUPLICATES,
                        });
                    }
                    ex = candidate(grammar, config, split_id as u64, base + k, chunk[k], attempt)?;
                }
                examples.push(ex);
            }
        }
        // Sources of earlier splits are excluded whatever `dedup` says.
        seen.extend(within);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[config.seed, split_id as u64, u64::MAX]));
        examples.shuffle(&mut rng);
        splits.insert(split.to_string(), examples);
    }
    let manifest = DatasetManifest {
        config: ManifestConfig::Built(config.clone()),
        splits,
    };
    check_manifest(grammar, &manifest)?;
    Ok(manifest)
}

/// Post-build audit: split sizes, structure filters, train/gen
/// disjointness, and agreement of the rules on every ambiguous example.
pub fn check_manifest(grammar: &Grammar, manifest: &DatasetManifest) -> Result<(), DatasetError> {
    let ManifestConfig::Built(config) = &manifest.config else {
        return Ok(());
    };
    let fail = |m: String| Err(DatasetError::Invariant(m));
    for split in SPLITS {
        let examples = manifest.split(split).unwrap_or(&[]);
        let want = config.counts.get(split).expect("known split");
        if examples.len() != want {
            return fail(format!("{split} has {} examples, expected {want}", examples.len()));
        }
    }
    let train_sources: HashSet<&[String]> = manifest.splits["train"].iter().map(|e| e.source.as_slice()).collect();
    for ex in &manifest.splits["gen"] {
        if ex.is_identity() || ex.structure.modifier != Modifier::OnSubject {
            return fail(format!("gen example `{}` is not a transformed on-subject example", ex.source.join(" ")));
        }
        if train_sources.contains(ex.source.as_slice()) {
            return fail(format!("gen source `{}` also occurs in train", ex.source.join(" ")));
        }
    }
    let audits: Result<(), DatasetError> = ["train", "dev", "test"]
        .par_iter()
        .try_for_each(|split| {
            manifest.splits[*split].par_iter().try_for_each(|ex| {
                if ex.is_identity() {
                    if ex.source != ex.target {
                        return Err(DatasetError::Invariant(format!("identity example differs: {}", ex.source.join(" "))));
                    }
                    return Ok(());
                }
                if ex.structure.modifier == Modifier::OnSubject {
                    return Err(DatasetError::Invariant(format!(
                        "{split} contains a transformed on-subject example: {}",
                        ex.source.join(" ")
                    )));
                }
                let tree = grammar.parse(&ex.source)?;
                let linear = transform::apply(TransformRule::linear(config.task), grammar, &tree)?;
                if linear.output != ex.target {
                    return Err(DatasetError::Invariant(format!(
                        "rules disagree on ambiguous {split} example `{}`",
                        ex.source.join(" ")
                    )));
                }
                Ok(())
            })
        });
    audits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(task: Task, lang: Language) -> DatasetConfig {
        let mut c = DatasetConfig::new(lang, task, 3);
        c.counts = SplitCounts {
            train: 400,
            dev: 40,
            test: 60,
            gen: 50,
        };
        c
    }

    #[test]
    fn builds_small_splits() {
        for lang in [Language::En, Language::De] {
            for task in Task::ALL {
                let g = Grammar::builtin(lang);
                let m = build_splits(g, &small(task, lang)).unwrap();
                let train = m.split("train").unwrap();
                assert_eq!(train.iter().filter(|e| e.is_identity()).count(), 200);
                assert!(train
                    .iter()
                    .any(|e| e.is_identity() && e.structure.modifier == Modifier::OnSubject));
                assert!(m.split("gen").unwrap().iter().all(|e| e.task == task.into()));
            }
        }
    }

    #[test]
    fn deterministic() {
        let g = Grammar::builtin(Language::En);
        let c = small(Task::Quest, Language::En);
        assert_eq!(build_splits(g, &c).unwrap(), build_splits(g, &c).unwrap());
    }

    #[test]
    fn rejects_mismatched_language() {
        let g = Grammar::builtin(Language::En);
        assert!(matches!(
            build_splits(g, &small(Task::Quest, Language::De)),
            Err(DatasetError::Config(_))
        ));
    }

    #[test]
    fn structure_sampling_is_hierarchically_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut on_object_gaps = [0usize; 2];
        for _ in 0..4000 {
            let s = sample_spec(Task::Quest, Placement::Ambiguous, &mut rng);
            if s.modifier == Modifier::OnObject {
                on_object_gaps[(s.rc_gap == Some(crate::grammar::RcGap::ObjectGap)) as usize] += 1;
            }
        }
        let total = on_object_gaps[0] + on_object_gaps[1];
        assert!((1800..2200).contains(&total), "{total}");
        assert!((800..1200).contains(&on_object_gaps[0]));
    }
}
