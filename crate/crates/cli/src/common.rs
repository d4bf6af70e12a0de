//! Helpers shared by the subcommands: grammar selection, sidecars, exit
//! codes.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use povstim::dataset::DatasetError;
use povstim::eval::EvalError;
use povstim::features::Language;
use povstim::grammar::{Grammar, GrammarError};
use povstim::miner::MinerError;
use povstim::transform::TransformError;

/// Bad flags or an invalid flag combination.
pub const EXIT_USAGE: u8 = 1;
/// Missing, unreadable, malformed or misaligned input.
pub const EXIT_DATA: u8 = 2;
/// A generated artifact broke one of its own invariants.
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub struct DataError(pub String);

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DataError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

pub fn data(message: impl Into<String>) -> anyhow::Error {
    DataError(message.into()).into()
}

fn classify(cause: &(dyn std::error::Error + 'static)) -> Option<u8> {
    if cause.is::<UsageError>() {
        return Some(EXIT_USAGE);
    }
    if cause.is::<DataError>() || cause.is::<io::Error>() || cause.is::<serde_json::Error>() {
        return Some(EXIT_DATA);
    }
    if let Some(e) = cause.downcast_ref::<GrammarError>() {
        return match e {
            GrammarError::InvalidSpec { .. } => Some(EXIT_USAGE),
            GrammarError::Unrealizable { .. } | GrammarError::Invalid(_) => Some(EXIT_INTERNAL),
            _ => Some(EXIT_DATA),
        };
    }
    if let Some(e) = cause.downcast_ref::<DatasetError>() {
        return match e {
            DatasetError::Config(_) | DatasetError::Recipe(_) => Some(EXIT_USAGE),
            DatasetError::Invariant(_) => Some(EXIT_INTERNAL),
            DatasetError::Grammar(_) | DatasetError::Transform(_) => None,
            _ => Some(EXIT_DATA),
        };
    }
    if let Some(e) = cause.downcast_ref::<EvalError>() {
        return match e {
            EvalError::Oracle { .. } | EvalError::Grammar(_) => None,
            _ => Some(EXIT_DATA),
        };
    }
    if let Some(e) = cause.downcast_ref::<MinerError>() {
        return match e {
            MinerError::Config(_) | MinerError::ZeroDenominator { .. } | MinerError::NotAProbability { .. } => {
                Some(EXIT_USAGE)
            }
            _ => Some(EXIT_DATA),
        };
    }
    if let Some(e) = cause.downcast_ref::<TransformError>() {
        return match e {
            TransformError::WrongTask { .. } => Some(EXIT_USAGE),
            TransformError::Replay { .. } => Some(EXIT_INTERNAL),
            _ => Some(EXIT_DATA),
        };
    }
    None
}

/// Exit code for a failed run: the first cause in the chain that has a
/// known class decides, anything unclassified counts as internal.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain().find_map(classify).unwrap_or(EXIT_INTERNAL)
}

/// Which grammar to use: a shipped one or a directory holding
/// `grammar.cfg` and `lexicon.tsv`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct GrammarArgs {
    /// Language of the shipped grammar (en or de).
    #[arg(long)]
    pub lang: Option<Language>,
    /// Directory with a custom grammar.cfg and lexicon.tsv.
    #[arg(long, value_name = "DIR")]
    pub grammar_dir: Option<PathBuf>,
}

impl GrammarArgs {
    pub fn is_set(&self) -> bool {
        self.lang.is_some() || self.grammar_dir.is_some()
    }

    pub fn load(&self) -> Result<&'static Grammar> {
        match (&self.grammar_dir, self.lang) {
            (Some(dir), lang) => {
                let g = Grammar::from_dir(dir).with_context(|| format!("loading grammar from {}", dir.display()))?;
                if let Some(lang) = lang {
                    if g.language() != lang {
                        return Err(usage(format!(
                            "--lang {lang} disagrees with the grammar in {} ({})",
                            dir.display(),
                            g.language()
                        )));
                    }
                }
                Ok(Box::leak(Box::new(g)))
            }
            (None, Some(lang)) => Ok(Grammar::builtin(lang)),
            (None, None) => Err(usage("one of --lang or --grammar-dir is required")),
        }
    }
}

/// Everything needed to rerun a command.
#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: &'a T,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes the run sidecar to `path`.
pub fn write_sidecar<T: Serialize>(path: &Path, command: &str, args: &T) -> Result<()> {
    write_json(
        path,
        &RunRecord {
            tool: "povstim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args,
        },
    )
}

/// Sidecar path for a single output file: `<file>.run.json`.
pub fn sidecar_for(file: &Path) -> PathBuf {
    let mut name = file.file_name().unwrap_or_default().to_os_string();
    name.push(".run.json");
    file.with_file_name(name)
}

/// Output file or stdout.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            Box::new(io::BufWriter::new(
                fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            ))
        }
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
