//! Mixed-language training sets assembled from per-language builds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::Language;
use crate::seed::derive_seed;

use super::{DatasetError, DatasetManifest, ExampleTask, ManifestConfig};

/// Training examples of one language restricted to some example tasks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeSlice {
    pub language: Language,
    pub tasks: Vec<ExampleTask>,
}

/// Which slices of the input builds make up the training split. Text form:
/// `en:quest+decl,de:decl`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Recipe {
    pub slices: Vec<RecipeSlice>,
}

impl FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut slices = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lang, tasks) = part
                .split_once(':')
                .ok_or_else(|| format!("slice `{part}` is not of the form lang:task+task"))?;
            let language: Language = lang.trim().parse().map_err(|e| format!("{e}"))?;
            let tasks = tasks
                .split('+')
                .map(|t| t.trim().parse::<ExampleTask>())
                .collect::<Result<Vec<_>, _>>()?;
            slices.push(RecipeSlice { language, tasks });
        }
        Ok(Recipe { slices })
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slices
            .iter()
            .map(|s| {
                let tasks: Vec<&str> = s.tasks.iter().map(|t| t.as_str()).collect();
                format!("{}:{}", s.language, tasks.join("+"))
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Merges the recipe's training slices into one shuffled `train` split.
/// Evaluation splits are kept per build as `<split>.<language>.<task>`.
pub fn compose_crosslingual(
    manifests: &[DatasetManifest],
    recipe: &Recipe,
    seed: u64,
) -> Result<DatasetManifest, DatasetError> {
    if recipe.slices.is_empty() {
        return Err(DatasetError::Recipe("empty recipe".into()));
    }
    let mut sources = Vec::new();
    for m in manifests {
        match &m.config {
            ManifestConfig::Built(c) => sources.push(c.clone()),
            ManifestConfig::Composed { .. } => {
                return Err(DatasetError::Recipe("inputs must be single-language builds".into()))
            }
        }
    }

    let mut train = Vec::new();
    for slice in &recipe.slices {
        if slice.tasks.is_empty() {
            return Err(DatasetError::Recipe(format!("slice for {} names no task", slice.language)));
        }
        for task in &slice.tasks {
            let before = train.len();
            for (m, c) in manifests.iter().zip(&sources) {
                if c.language != slice.language {
                    continue;
                }
                if let Some(examples) = m.split("train") {
                    train.extend(examples.iter().filter(|e| e.task == *task).cloned());
                }
            }
            if train.len() == before {
                return Err(DatasetError::Recipe(format!(
                    "slice {}:{task} is not present in the input builds",
                    slice.language
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed]));
    train.shuffle(&mut rng);

    let mut splits = BTreeMap::new();
    splits.insert("train".to_string(), train);
    for (m, c) in manifests.iter().zip(&sources) {
        for split in ["dev", "test", "gen"] {
            let key = format!("{split}.{}.{}", c.language, c.task);
            let examples = m.split(split).unwrap_or(&[]).to_vec();
            if splits.insert(key.clone(), examples).is_some() {
                return Err(DatasetError::Recipe(format!("two input builds provide {key}")));
            }
        }
    }
    Ok(DatasetManifest {
        config: ManifestConfig::Composed {
            recipe: recipe.clone(),
            seed,
            sources,
        },
        splits,
    })
}
