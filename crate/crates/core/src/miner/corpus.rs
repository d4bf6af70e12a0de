//! Corpus input and mining output files.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    scan_pairs, sort_pairs, DisambiguationEstimate, MinedPair, MinerConfig, MinerError, RcDetector, ScanStats,
    Segmenter,
};

/// Records scanned per parallel batch when streaming a corpus file.
const BATCH: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> MinerError + '_ {
    move |source| MinerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses a `doc_id<TAB>text` record. Records without a tab, with an
/// empty id or with invalid UTF-8 are malformed.
fn parse_record(raw: &[u8]) -> Option<Document> {
    let line = std::str::from_utf8(raw).ok()?;
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (id, text) = line.split_once('\t')?;
    let id = id.trim();
    (!id.is_empty()).then(|| Document {
        id: id.to_string(),
        text: text.to_string(),
    })
}

fn dir_files(dir: &Path) -> Result<Vec<PathBuf>, MinerError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if entry.file_type().map_err(io_err(dir))?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

/// Document from a one-document-per-file corpus; `None` for non-UTF-8
/// files.
fn read_file_doc(path: &Path) -> Result<Option<Document>, MinerError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let id = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(String::from_utf8(bytes).ok().map(|text| Document { id, text }))
}

/// Reads a whole corpus into memory. `path` is either a file of
/// `doc_id<TAB>text` lines or a directory holding one document per file.
/// Returns the documents and the number of malformed records skipped.
pub fn read_corpus(path: &Path) -> Result<(Vec<Document>, usize), MinerError> {
    let mut docs = Vec::new();
    let mut malformed = 0;
    if path.is_dir() {
        for file in dir_files(path)? {
            match read_file_doc(&file)? {
                Some(d) => docs.push(d),
                None => malformed += 1,
            }
        }
    } else {
        let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
        for raw in reader.split(b'\n') {
            let raw = raw.map_err(io_err(path))?;
            if raw.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            match parse_record(&raw) {
                Some(d) => docs.push(d),
                None => malformed += 1,
            }
        }
    }
    if malformed > 0 {
        log::warn!("{}: skipped {malformed} malformed records", path.display());
    }
    Ok((docs, malformed))
}

/// Streams a corpus through [`scan_pairs`] in bounded batches.
pub fn scan_corpus(
    path: &Path,
    config: &MinerConfig,
    segmenter: &dyn Segmenter,
    rc: Option<&dyn RcDetector>,
) -> Result<(Vec<MinedPair>, ScanStats), MinerError> {
    config.validate()?;
    let mut pairs = Vec::new();
    let mut stats = ScanStats::default();
    let mut batch = Vec::with_capacity(BATCH);
    let flush = |batch: &mut Vec<Document>, pairs: &mut Vec<MinedPair>, stats: &mut ScanStats| {
        let (p, s) = scan_pairs(batch, config, segmenter, rc);
        pairs.extend(p);
        *stats += s;
        batch.clear();
    };
    if path.is_dir() {
        for file in dir_files(path)? {
            match read_file_doc(&file)? {
                Some(d) => batch.push(d),
                None => stats.malformed += 1,
            }
            if batch.len() == BATCH {
                flush(&mut batch, &mut pairs, &mut stats);
            }
        }
    } else {
        let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
        for raw in reader.split(b'\n') {
            let raw = raw.map_err(io_err(path))?;
            if raw.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            match parse_record(&raw) {
                Some(d) => batch.push(d),
                None => stats.malformed += 1,
            }
            if batch.len() == BATCH {
                flush(&mut batch, &mut pairs, &mut stats);
            }
        }
    }
    flush(&mut batch, &mut pairs, &mut stats);
    if stats.malformed > 0 {
        log::warn!("{}: skipped {} malformed records", path.display(), stats.malformed);
    }
    sort_pairs(&mut pairs);
    Ok((pairs, stats))
}

pub const PAIRS_HEADER: &str =
    "doc_id\tsentence_index\tjaccard\taux_initial\tdistinct_aux_count_a\tdistinct_aux_count_b\tsent_a\tsent_b";

/// Writes the review file: one candidate pair per line under a header.
pub fn write_pairs<W: Write>(pairs: &[MinedPair], mut out: W) -> io::Result<()> {
    writeln!(out, "{PAIRS_HEADER}")?;
    for p in pairs {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}",
            p.doc_id,
            p.sentence_index,
            p.jaccard,
            p.aux_initial,
            p.distinct_aux_count_a,
            p.distinct_aux_count_b,
            p.sent_a.join(" "),
            p.sent_b.join(" ")
        )?;
    }
    Ok(())
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineSummary {
    pub config: MinerConfig,
    pub segmenter: String,
    pub rc_detector: Option<String>,
    pub stats: ScanStats,
    pub candidates: usize,
    /// Pair count behind `estimate`: the reviewed count when one was
    /// supplied, otherwise the candidate count (an upper bound).
    pub pair_count: u64,
    pub pair_count_reviewed: bool,
    pub estimate: Option<DisambiguationEstimate>,
}
