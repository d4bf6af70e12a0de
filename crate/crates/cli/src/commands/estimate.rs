use std::io::Write;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use povstim::miner::{estimate, DisambiguationEstimate};

use crate::common::{open_output, usage};

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    /// Reviewed declarative/question pairs.
    #[arg(long, requires = "pair_total", conflicts_with = "p_pair")]
    pub pair_count: Option<u64>,
    /// Sentences the pairs were drawn from.
    #[arg(long, requires = "pair_count")]
    pub pair_total: Option<u64>,
    /// Pair probability, instead of counts.
    #[arg(long)]
    pub p_pair: Option<f64>,
    /// Sentences with an RC on the subject.
    #[arg(long, requires = "rc_total", conflicts_with = "p_rc")]
    pub rc_count: Option<u64>,
    #[arg(long, requires = "rc_count")]
    pub rc_total: Option<u64>,
    /// Subject-RC probability, instead of counts.
    #[arg(long)]
    pub p_rc: Option<f64>,
    /// Sentences seen by the model.
    #[arg(long)]
    pub sentences: f64,
}

#[derive(Serialize)]
struct Output {
    #[serde(flatten)]
    estimate: DisambiguationEstimate,
    product: f64,
}

pub fn run(args: EstimateArgs) -> Result<()> {
    let p_pair = match (args.p_pair, args.pair_count, args.pair_total) {
        (Some(p), _, _) => p,
        (None, Some(c), Some(t)) => estimate(c, t, 0, 1, 0.0)?.p_pair,
        _ => return Err(usage("give --p-pair or --pair-count with --pair-total")),
    };
    let p_rc = match (args.p_rc, args.rc_count, args.rc_total) {
        (Some(p), _, _) => p,
        (None, Some(c), Some(t)) => estimate(0, 1, c, t, 0.0)?.p_rc_subject,
        _ => return Err(usage("give --p-rc or --rc-count with --rc-total")),
    };
    let e = DisambiguationEstimate::from_probabilities(p_pair, p_rc, args.sentences)?;
    let mut out = open_output(None)?;
    let text = serde_json::to_string_pretty(&Output {
        estimate: e,
        product: e.product(),
    })?;
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}
