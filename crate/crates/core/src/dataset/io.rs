//! Tab-separated split files and the `metadata.json` sidecar.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grammar::Grammar;

use super::{DatasetError, DatasetManifest, ExampleTask, ManifestConfig, TransformExample};

/// Where the task tag goes in the source column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// `quest: <source>` (pre-trained model style).
    PrefixFirst,
    /// `<source> quest` (from-scratch model style).
    MarkerLast,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::PrefixFirst => "prefix-first",
            Format::MarkerLast => "marker-last",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prefix-first" => Ok(Format::PrefixFirst),
            "marker-last" => Ok(Format::MarkerLast),
            other => Err(format!("unknown format `{other}` (expected prefix-first or marker-last)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub file: String,
    pub count: usize,
    pub identity: usize,
    /// Number of examples per structure, keyed by its display form.
    pub structures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ManifestConfig,
    pub format: Format,
    pub splits: BTreeMap<String, SplitInfo>,
}

/// Renders one example as `source<TAB>target`.
pub fn format_line(ex: &TransformExample, format: Format) -> String {
    let source = ex.source.join(" ");
    let target = ex.target.join(" ");
    match format {
        Format::PrefixFirst => format!("{} {source}\t{target}", ex.task.prefix()),
        Format::MarkerLast => format!("{source} {}\t{target}", ex.task.as_str()),
    }
}

/// Splits a line into task, source tokens and target tokens.
pub fn parse_line(line: &str, format: Format) -> Result<(ExampleTask, Vec<String>, Vec<String>), String> {
    let (source, target) = line
        .split_once('\t')
        .ok_or("expected two tab-separated columns")?;
    if target.contains('\t') {
        return Err("expected two tab-separated columns, found more".into());
    }
    let mut source: Vec<String> = source.split_whitespace().map(str::to_string).collect();
    let target: Vec<String> = target.split_whitespace().map(str::to_string).collect();
    let task = match format {
        Format::PrefixFirst => {
            let first = source.first().ok_or("empty source")?;
            let tag = first
                .strip_suffix(':')
                .ok_or_else(|| format!("source does not start with a task prefix (`{first}`)"))?;
            let task = tag.parse::<ExampleTask>()?;
            source.remove(0);
            task
        }
        Format::MarkerLast => {
            let last = source.pop().ok_or("empty source")?;
            last.parse::<ExampleTask>()?
        }
    };
    if source.is_empty() || target.is_empty() {
        return Err("empty source or target".into());
    }
    Ok((task, source, target))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one split file.
pub fn write_split(path: &Path, examples: &[TransformExample], format: Format) -> Result<(), DatasetError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for ex in examples {
        writeln!(w, "{}", format_line(ex, format)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes `<split>.tsv` for every split plus `metadata.json` into `dir`.
pub fn write_manifest(manifest: &DatasetManifest, dir: &Path, format: Format) -> Result<Metadata, DatasetError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut splits = BTreeMap::new();
    for (name, examples) in &manifest.splits {
        let file = format!("{name}.tsv");
        write_split(&dir.join(&file), examples, format)?;
        let mut structures = BTreeMap::new();
        for ex in examples {
            *structures.entry(ex.structure.to_string()).or_insert(0) += 1;
        }
        splits.insert(
            name.clone(),
            SplitInfo {
                file,
                count: examples.len(),
                identity: examples.iter().filter(|e| e.is_identity()).count(),
                structures,
            },
        );
    }
    let metadata = Metadata {
        config: manifest.config.clone(),
        format,
        splits,
    };
    let path = dir.join("metadata.json");
    let mut json = serde_json::to_string_pretty(&metadata).map_err(|source| DatasetError::Json {
        path: path.clone(),
        source,
    })?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))?;
    Ok(metadata)
}

pub fn read_metadata(dir: &Path) -> Result<Metadata, DatasetError> {
    let path = dir.join("metadata.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Json { path, source })
}

/// Reads one split file. Structures are recovered by parsing each source
/// with the first grammar that accepts it.
pub fn read_split(path: &Path, format: Format, grammars: &[&Grammar]) -> Result<Vec<TransformExample>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let lines: Vec<&str> = text.lines().collect();
    lines
        .par_iter()
        .enumerate()
        .map(|(i, line)| {
            let bad = |message: String| DatasetError::Format {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (task, source, target) = parse_line(line, format).map_err(bad)?;
            let (language, structure) = grammars
                .iter()
                .find_map(|g| g.classify_structure(&source).ok().map(|s| (g.language(), s)))
                .ok_or_else(|| bad(format!("no grammar parses `{}`", source.join(" "))))?;
            Ok(TransformExample {
                task,
                language,
                structure,
                source,
                target,
            })
        })
        .collect()
}

/// Reads a directory written by [`write_manifest`].
pub fn read_manifest(dir: &Path, grammars: &[&Grammar]) -> Result<DatasetManifest, DatasetError> {
    let metadata = read_metadata(dir)?;
    let mut splits = BTreeMap::new();
    for (name, info) in &metadata.splits {
        let path: PathBuf = dir.join(&info.file);
        splits.insert(name.clone(), read_split(&path, metadata.format, grammars)?);
    }
    Ok(DatasetManifest {
        config: metadata.config,
        splits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Language;
    use crate::grammar::{Modifier, StructureSpec, Transitivity};

    fn example() -> TransformExample {
        let toks = |s: &str| s.split_whitespace().map(str::to_string).collect();
        TransformExample {
            task: ExampleTask::Quest,
            language: Language::En,
            structure: StructureSpec::quest(Modifier::None, Transitivity::Trans, None),
            source: toks("some xylophones have remembered my yak ."),
            target: toks("have some xylophones remembered my yak ?"),
        }
    }

    #[test]
    fn line_formats() {
        let ex = example();
        let line = format_line(&ex, Format::PrefixFirst);
        assert_eq!(
            line,
            "quest: some xylophones have remembered my yak .\thave some xylophones remembered my yak ?"
        );
        assert_eq!(
            format_line(&ex, Format::MarkerLast),
            "some xylophones have remembered my yak . quest\thave some xylophones remembered my yak ?"
        );
        let (task, source, target) = parse_line(&line, Format::PrefixFirst).unwrap();
        assert_eq!((task, source, target), (ex.task, ex.source.clone(), ex.target.clone()));
        let (task, source, _) = parse_line(&format_line(&ex, Format::MarkerLast), Format::MarkerLast).unwrap();
        assert_eq!((task, source), (ex.task, ex.source));
        assert!(parse_line("no tab here", Format::PrefixFirst).is_err());
        assert!(parse_line("ask: a .\ta .", Format::PrefixFirst).is_err());
    }
}
