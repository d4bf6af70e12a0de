//! Learning-curve output: long-form CSV and minimal SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{EvalError, EvalReport};

fn sorted(reports: &[EvalReport]) -> Vec<&EvalReport> {
    let mut v: Vec<&EvalReport> = reports.iter().collect();
    v.sort_by_key(|r| r.checkpoint);
    v
}

fn checkpoint_label(r: &EvalReport) -> String {
    r.checkpoint.map(|c| c.to_string()).unwrap_or_default()
}

/// Writes `checkpoint,metric,value` rows ordered by checkpoint.
pub fn emit_curve<W: Write>(reports: &[EvalReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "checkpoint,metric,value")?;
    for r in sorted(reports) {
        for (name, value) in r.metrics() {
            writeln!(out, "{},{name},{value:.6}", checkpoint_label(r))?;
        }
    }
    Ok(())
}

/// Collects one `(checkpoint, value)` series per metric.
fn series(reports: &[EvalReport]) -> BTreeMap<&'static str, Vec<(u64, f64)>> {
    let mut map: BTreeMap<&'static str, Vec<(u64, f64)>> = BTreeMap::new();
    for r in sorted(reports) {
        for (name, value) in r.metrics() {
            map.entry(name).or_default().push((r.checkpoint.unwrap_or(0), value));
        }
    }
    map
}

/// Writes `<metric>.csv` (columns `checkpoint,value`) for every metric and,
/// if `svg` is set, a matching `<metric>.svg`. Returns the metric names.
pub fn write_metric_curves(reports: &[EvalReport], dir: &Path, svg: bool) -> Result<Vec<String>, EvalError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| EvalError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut names = Vec::new();
    for (name, points) in series(reports) {
        let mut csv = String::from("checkpoint,value\n");
        for (c, v) in &points {
            let _ = writeln!(csv, "{c},{v:.6}");
        }
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, csv).map_err(io(&path))?;
        if svg {
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, render_svg(name, &points)).map_err(io(&path))?;
        }
        names.push(name.to_string());
    }
    Ok(names)
}

/// A line plot of `points` on a [0, 1] y-axis.
pub fn render_svg(title: &str, points: &[(u64, f64)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 300.0;
    const PAD: f64 = 40.0;
    let max_x = points.iter().map(|p| p.0).max().unwrap_or(0).max(1) as f64;
    let min_x = points.iter().map(|p| p.0).min().unwrap_or(0) as f64;
    let span = (max_x - min_x).max(1.0);
    let x = |c: u64| PAD + (c as f64 - min_x) / span * (W - 2.0 * PAD);
    let y = |v: f64| H - PAD - v.clamp(0.0, 1.0) * (H - 2.0 * PAD);
    let path: Vec<String> = points.iter().map(|&(c, v)| format!("{:.1},{:.1}", x(c), y(v))).collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{}</text>"#,
        title.replace('&', "&amp;").replace('<', "&lt;")
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{} V{} H{}" stroke="black" fill="none"/>"#,
        PAD,
        H - PAD,
        W - PAD
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{tick:.1}</text>"#,
            PAD - 4.0,
            y(tick) + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 10.0,
        max_x as u64
    );
    if !path.is_empty() {
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
            path.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
