use std::fmt::Write as _;
use std::io::Write;

use super::config::ExperimentConfig;
use super::experiment::{CoverageResult, SweepAxis};
use crate::error::Result;
use crate::neuralnet::EpochMetrics;
use crate::policies::PolicyKind;

pub fn write_results_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, extra: &str, results: &[CoverageResult]) -> Result<()> {
    writeln!(out, "{}", cfg.header_comment(extra))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis_value", "policy", "coverage", "ci_low", "ci_high", "n_trials"])?;
    for r in results {
        w.write_record([
            r.axis_value.to_string(),
            r.policy.to_string(),
            r.coverage.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.n_trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `rows` holds one `(height, probability per rank)` pair per height.
pub fn write_histogram_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, extra: &str, rows: &[(f64, Vec<f64>)]) -> Result<()> {
    writeln!(out, "{}", cfg.header_comment(extra))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["height_m", "rank", "probability"])?;
    for (h, probs) in rows {
        for (rank, p) in probs.iter().enumerate() {
            w.write_record([h.to_string(), rank.to_string(), p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, extra: &str, metrics: &[EpochMetrics]) -> Result<()> {
    writeln!(out, "{}", cfg.header_comment(extra))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["epoch", "train_loss", "train_accuracy", "validation_accuracy"])?;
    for m in metrics {
        w.write_record([
            m.epoch.to_string(),
            m.train_loss.to_string(),
            m.train_accuracy.to_string(),
            m.validation_accuracy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Line chart of coverage against the sweep axis, one line per policy.
pub fn sweep_svg(axis: SweepAxis, results: &[CoverageResult]) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let xs: Vec<f64> = results.iter().map(|r| r.axis_value).collect();
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(x_max > x_min) {
        x_max = x_min + 1.0;
    }
    let px = |x: f64| m + (x - x_min) / (x_max - x_min) * (w - 2.0 * m);
    let py = |y: f64| h - m - y * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {} V{} H{}" fill="none" stroke="black"/>"#,
        m,
        h - m,
        w - m
    );
    for k in 0..=5 {
        let y = k as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y:.1}</text>"#, m - 6.0, py(y) + 4.0);
    }
    let mut ticks = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in &ticks {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#, px(*x), h - m + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, axis.label());
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">coverage probability</text>"#,
        h / 2.0,
        h / 2.0
    );

    for (k, kind) in PolicyKind::ALL.iter().enumerate() {
        let mut pts: Vec<&CoverageResult> = results.iter().filter(|r| r.policy == *kind).collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|r| format!("{:.2},{:.2}", px(r.axis_value), py(r.coverage))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, path.join(" "));
        for r in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(r.axis_value), py(r.coverage));
        }
        let ly = m + 18.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - m - 110.0, w - m - 85.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{kind}</text>"#, w - m - 80.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}
