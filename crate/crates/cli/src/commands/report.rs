use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use povstim::eval::{emit_curve, write_metric_curves, EvalReport};

use crate::common::{open_output, read_text, usage, write_sidecar};

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Report files written by `evaluate --out`, or directories holding
    /// them (every `*.json` except `*.run.json`).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory for curve.csv and one <metric>.csv per metric.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also draw one SVG line plot per metric.
    #[arg(long)]
    pub svg: bool,
}

fn collect(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("listing {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    let name = p.file_name().unwrap_or_default().to_string_lossy();
                    name.ends_with(".json") && !name.ends_with(".run.json")
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

pub fn run(args: ReportArgs) -> Result<()> {
    let files = collect(&args.inputs)?;
    if files.is_empty() {
        return Err(usage("no report files found"));
    }
    let mut reports = Vec::with_capacity(files.len());
    for f in &files {
        let report: EvalReport =
            serde_json::from_str(&read_text(f)?).with_context(|| format!("parsing {}", f.display()))?;
        reports.push(report);
    }
    if reports.iter().filter(|r| r.checkpoint.is_none()).count() > 1 {
        return Err(usage("several reports lack a checkpoint; pass --checkpoint to evaluate"));
    }
    let names = write_metric_curves(&reports, &args.out, args.svg)?;
    let mut w = open_output(Some(&args.out.join("curve.csv")))?;
    emit_curve(&reports, &mut w)?;
    drop(w);
    write_sidecar(&args.out.join("run.json"), "report", &args)?;
    log::info!("{} reports, metrics: {}", reports.len(), names.join(", "));
    println!("{}", args.out.display());
    Ok(())
}
