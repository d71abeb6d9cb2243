use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::bench::{AggregateRecord, BenchReport, SequenceRun};
use super::metrics::{overlap_threshold, PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS};
use super::plot::svg_line_plot;
use crate::error::{Error, Result};

pub const FRAME_CSV_HEADER: &[&str] = &[
    "frame", "pred_x", "pred_y", "pred_w", "pred_h", "gt_x", "gt_y", "gt_w", "gt_h", "cle", "iou", "peak", "zscore",
    "gate", "redetect",
];

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `<out>/<sequence>/<label>.csv` and returns its path.
pub fn write_run_csv(run: &SequenceRun, out: &Path) -> Result<std::path::PathBuf> {
    let dir = out.join(&run.sequence);
    create_dir(&dir)?;
    let path = dir.join(format!("{}.csv", run.label));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(FRAME_CSV_HEADER)?;
    for row in &run.rows {
        let p = row.pred;
        let mut rec = vec![row.frame.to_string(), f4(p.x), f4(p.y), f4(p.w), f4(p.h)];
        match row.gt {
            Some(g) => {
                rec.extend([f4(g.x), f4(g.y), f4(g.w), f4(g.h)]);
                rec.push(f6(super::cle(&p, &g)));
                rec.push(f6(super::iou(&p, &g)));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 6)),
        }
        match &row.diagnostics {
            Some(d) => {
                rec.push(f6(d.peak));
                rec.push(d.z_score.map(f6).unwrap_or_default());
                rec.push(d.gate.as_str().to_string());
                rec.push(u8::from(d.redetected).to_string());
            }
            None => rec.extend([String::new(), String::new(), "init".into(), "0".into()]),
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_summary(report: &BenchReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["sequence", "mode", "frames", "annotated", "precision_20", "auc", "mean_cle", "redetections"])?;
    for run in &report.runs {
        let redetections = run.rows.iter().filter(|r| r.diagnostics.as_ref().is_some_and(|d| d.redetected)).count();
        w.write_record([
            run.sequence.clone(),
            run.label.clone(),
            run.rows.len().to_string(),
            run.record.cle.len().to_string(),
            f6(run.record.precision_20()),
            f6(run.record.auc),
            f4(run.record.mean_cle()),
            redetections.to_string(),
        ])?;
    }
    for agg in &report.aggregates {
        w.write_record([
            "ALL".to_string(),
            agg.label.clone(),
            agg.frames.to_string(),
            agg.sequences.to_string(),
            f6(agg.precision_20()),
            f6(agg.auc),
            String::new(),
            String::new(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_curves(aggs: &[AggregateRecord], dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let labels: Vec<&str> = aggs.iter().map(|a| a.label.as_str()).collect();

    let precision_x: Vec<f64> = (0..PRECISION_THRESHOLDS).map(|t| t as f64).collect();
    let success_x: Vec<f64> = (0..SUCCESS_THRESHOLDS).map(overlap_threshold).collect();
    for (name, xs, pick, x_label) in [
        ("precision", &precision_x, 0, "location error threshold (px)"),
        ("success", &success_x, 1, "overlap threshold"),
    ] {
        let curve = |a: &AggregateRecord| if pick == 0 { a.precision.clone() } else { a.success.clone() };
        let path = dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["threshold"];
        header.extend(&labels);
        w.write_record(&header)?;
        for (i, x) in xs.iter().enumerate() {
            let mut rec = vec![format!("{x:.2}")];
            rec.extend(aggs.iter().map(|a| f6(curve(a)[i])));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let series: Vec<(String, Vec<f64>)> = aggs
            .iter()
            .map(|a| {
                let score = if pick == 0 { a.precision_20() } else { a.auc };
                (format!("{} [{:.3}]", a.label, score), curve(a))
            })
            .collect();
        let title = if pick == 0 { "Precision plot" } else { "Success plot" };
        write_text(&dir.join(format!("{name}.svg")), &svg_line_plot(title, x_label, xs, &series))?;
    }
    Ok(())
}

/// Writes all result files under `out`. Wall-clock figures go to
/// `timing.txt` only.
pub fn write_report(report: &BenchReport, out: &Path) -> Result<()> {
    create_dir(out)?;
    for run in &report.runs {
        write_run_csv(run, out)?;
    }
    write_summary(report, &out.join("summary.csv"))?;
    write_curves(&report.aggregates, &out.join("curves"))?;

    let mut timing = String::from("# mode sequence frames seconds fps\n");
    for run in &report.runs {
        let _ = writeln!(
            timing,
            "{} {} {} {:.4} {:.2}",
            run.label,
            run.sequence,
            run.rows.len(),
            run.tracking_time.as_secs_f64(),
            run.record.fps
        );
    }
    for agg in &report.aggregates {
        let _ = writeln!(timing, "{} ALL {} - {:.2}", agg.label, agg.frames, agg.fps);
    }
    write_text(&out.join("timing.txt"), &timing)?;

    let failures = out.join("failures.txt");
    if report.failures.is_empty() {
        if failures.exists() {
            fs::remove_file(&failures).map_err(|e| Error::io(&failures, e))?;
        }
    } else {
        let text: String =
            report.failures.iter().map(|f| format!("{} [{}]: {}\n", f.sequence, f.label, f.message)).collect();
        write_text(&failures, &text)?;
    }
    Ok(())
}

/// Comparison table with precision at 20 px, success AUC and speed per mode.
pub fn format_table(aggs: &[AggregateRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>14} {:>16} {:>12}", "Tracker", "Precision (%)", "Success rate (%)", "Speed (FPS)");
    for a in aggs {
        let _ = writeln!(
            s,
            "{:<10} {:>14.1} {:>16.1} {:>12.1}",
            a.label.to_uppercase(),
            100.0 * a.precision_20(),
            100.0 * a.auc,
            a.fps
        );
    }
    s
}
