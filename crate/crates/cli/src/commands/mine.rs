use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use povstim::miner::{
    default_auxiliaries, scan_corpus, write_pairs, AnnotatedRcDetector, DisambiguationEstimate, HeuristicRcDetector,
    JaccardMode, MineSummary, MinerConfig, NewlineSegmenter, RcDetector, RuleSegmenter, Segmenter,
};

use crate::common::{data, open_output, read_text, write_json, write_sidecar};

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmenterKind {
    /// Terminal punctuation followed by a capital, with abbreviation guard.
    Rule,
    /// One sentence per line.
    Newline,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RcKind {
    Heuristic,
    None,
}

#[derive(Args, Debug, Serialize)]
pub struct MineArgs {
    /// File of doc_id<TAB>text lines, or a directory with one document per
    /// file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory for pairs.tsv and summary.json.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Pairs must be strictly more similar than this.
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    #[arg(long, default_value = "types")]
    pub jaccard: JaccardMode,
    /// File with one auxiliary per line, replacing the built-in list.
    #[arg(long, value_name = "FILE")]
    pub aux_list: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rule")]
    pub segmenter: SegmenterKind,
    /// Detector used to count sentences with an RC on the subject.
    #[arg(long, value_enum, default_value = "heuristic")]
    pub rc: RcKind,
    /// CoNLL-U parses to label sentences instead of the heuristic.
    #[arg(long, value_name = "FILE", conflicts_with = "rc")]
    pub rc_annotations: Option<PathBuf>,
    /// Number of candidates confirmed by manual review; used for the
    /// estimate in place of the candidate count.
    #[arg(long)]
    pub reviewed_pairs: Option<u64>,
    /// Corpus size for the expected count [default: sentences scanned].
    #[arg(long)]
    pub target_sentences: Option<f64>,
}

pub fn run(args: MineArgs) -> Result<()> {
    let auxiliaries = match &args.aux_list {
        Some(path) => read_text(path)?
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect(),
        None => default_auxiliaries(),
    };
    let config = MinerConfig {
        jaccard_threshold: args.threshold,
        jaccard_mode: args.jaccard,
        auxiliaries,
    };
    config.validate()?;
    let segmenter: Box<dyn Segmenter> = match args.segmenter {
        SegmenterKind::Rule => Box::new(RuleSegmenter::default()),
        SegmenterKind::Newline => Box::new(NewlineSegmenter),
    };
    let rc: Option<Box<dyn RcDetector>> = match (&args.rc_annotations, args.rc) {
        (Some(path), _) => {
            let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let d = AnnotatedRcDetector::from_conllu(BufReader::new(file))?;
            log::info!("{} annotated sentences", d.len());
            Some(Box::new(d))
        }
        (None, RcKind::Heuristic) => Some(Box::new(HeuristicRcDetector::new(config.auxiliaries.clone()))),
        (None, RcKind::None) => None,
    };

    let (pairs, stats) = scan_corpus(&args.corpus, &config, segmenter.as_ref(), rc.as_deref())?;
    if stats.documents == 0 {
        return Err(data(format!("{} holds no documents", args.corpus.display())));
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut w = open_output(Some(&args.out.join("pairs.tsv")))?;
    write_pairs(&pairs, &mut w)?;
    w.flush()?;

    let pair_count = args.reviewed_pairs.unwrap_or(pairs.len() as u64);
    let estimate = match (rc.is_some(), stats.sentences) {
        (true, n) if n > 0 => Some(DisambiguationEstimate::from_probabilities(
            pair_count as f64 / n as f64,
            stats.rc_subject as f64 / n as f64,
            args.target_sentences.unwrap_or(n as f64),
        )?),
        _ => None,
    };
    let summary = MineSummary {
        config,
        segmenter: segmenter.name().to_string(),
        rc_detector: rc.as_ref().map(|d| d.name().to_string()),
        stats,
        candidates: pairs.len(),
        pair_count,
        pair_count_reviewed: args.reviewed_pairs.is_some(),
        estimate,
    };
    write_json(&args.out.join("summary.json"), &summary)?;
    write_sidecar(&args.out.join("run.json"), "mine", &args)?;
    println!(
        "{} candidate pairs in {} documents ({} sentences)",
        pairs.len(),
        stats.documents,
        stats.sentences
    );
    Ok(())
}
