//! Output files: atomic writes, CSV emission and plot-data extraction.
//!
//! Every file is materialized in memory first and written through a
//! temp-then-rename so that failed runs leave no partial outputs. Numbers
//! are formatted with Rust's shortest round-trip representation, so the
//! files re-parse bit-exactly.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, Result};

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| CliError::Output(format!("no parent directory for {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Shortest round-trip decimal formatting (empty for missing cells).
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Build an RFC 4180 CSV from a header and string rows.
pub fn build_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| CliError::Output(format!("csv: {e}")))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| CliError::Output(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| CliError::Output(format!("csv: {e}")))
}

/// Stable JSON bytes: serde_json with sorted maps (the default map is a
/// BTreeMap) and shortest-round-trip floats.
pub fn json_bytes(value: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("json serializes");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    HistogramVsGaussian,
    CovarianceHeatmap,
    RateLoglog,
}

impl PlotKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "histogram_vs_gaussian" => Ok(PlotKind::HistogramVsGaussian),
            "covariance_heatmap" => Ok(PlotKind::CovarianceHeatmap),
            "rate_loglog" => Ok(PlotKind::RateLoglog),
            other => Err(CliError::Config(format!(
                "unknown plot kind '{other}' (histogram_vs_gaussian, covariance_heatmap, rate_loglog)"
            ))),
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::HistogramVsGaussian => "plot_histogram.csv",
            PlotKind::CovarianceHeatmap => "plot_covariance_heatmap.csv",
            PlotKind::RateLoglog => "plot_rate_loglog.csv",
        }
    }
}

/// Extract plot-ready CSV from a run summary (plus samples.jsonl for the
/// histogram kind). Returns the written file path.
pub fn emit_plot_data(
    summary: &Value,
    samples_jsonl: Option<&str>,
    kind: PlotKind,
    out_dir: &Path,
) -> Result<PathBuf> {
    let bytes = match kind {
        PlotKind::HistogramVsGaussian => histogram_csv(samples_jsonl)?,
        PlotKind::CovarianceHeatmap => heatmap_csv(summary)?,
        PlotKind::RateLoglog => rate_csv(summary)?,
    };
    let path = out_dir.join(kind.file_name());
    atomic_write(&path, &bytes)?;
    Ok(path)
}

/// First scalar of a samples.jsonl row: plain number, or the real part of
/// an [re, im] pair.
fn first_scalar(value: &Value) -> Option<f64> {
    let v = value.get("values")?.as_array()?.first()?;
    match v {
        Value::Number(x) => x.as_f64(),
        Value::Array(pair) => pair.first()?.as_f64(),
        _ => None,
    }
}

fn histogram_csv(samples_jsonl: Option<&str>) -> Result<Vec<u8>> {
    let text = samples_jsonl.ok_or_else(|| {
        CliError::Config(
            "histogram_vs_gaussian needs samples.jsonl (run with persist_samples = true)".into(),
        )
    })?;
    let mut xs = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let row: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Config(format!("samples.jsonl parse error: {e}")))?;
        if let Some(x) = first_scalar(&row) {
            xs.push(x);
        }
    }
    if xs.len() < 2 {
        return Err(CliError::Config(
            "histogram_vs_gaussian: not enough samples".into(),
        ));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let lo = mean - 4.0 * sd;
    let hi = mean + 4.0 * sd;
    let bins = (n.sqrt().ceil() as usize).clamp(10, 80);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        if x >= lo && x < hi {
            counts[((x - lo) / width) as usize] += 1;
        }
    }
    let rows: Vec<Vec<String>> = (0..bins)
        .map(|b| {
            let left = lo + b as f64 * width;
            let right = left + width;
            let center = 0.5 * (left + right);
            let density = (-0.5 * ((center - mean) / sd).powi(2)).exp()
                / (sd * (2.0 * std::f64::consts::PI).sqrt());
            vec![fmt(left), fmt(right), counts[b].to_string(), fmt(density)]
        })
        .collect();
    build_csv(&["bin_left", "bin_right", "count", "gaussian_density"], &rows)
}

fn heatmap_csv(summary: &Value) -> Result<Vec<u8>> {
    let results = summary.get("results").ok_or_else(|| {
        CliError::Config("summary has no results section".into())
    })?;
    let cov = results
        .get("cov_empirical")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            CliError::Config(
                "covariance_heatmap needs a resolvent_clt or gp_sample summary with cov_empirical"
                    .into(),
            )
        })?;
    let mut rows = Vec::new();
    for (i, r) in cov.iter().enumerate() {
        let r = r
            .as_array()
            .ok_or_else(|| CliError::Config("cov_empirical is not a matrix".into()))?;
        for (j, cell) in r.iter().enumerate() {
            let pair = cell
                .as_array()
                .ok_or_else(|| CliError::Config("cov cell is not [re, im]".into()))?;
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                pair.first().and_then(Value::as_f64).map(fmt).unwrap_or_default(),
                pair.get(1).and_then(Value::as_f64).map(fmt).unwrap_or_default(),
            ]);
        }
    }
    build_csv(&["row", "col", "cov_re", "cov_im"], &rows)
}

fn rate_csv(summary: &Value) -> Result<Vec<u8>> {
    let results = summary
        .get("results")
        .ok_or_else(|| CliError::Config("summary has no results section".into()))?;
    let points = results
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            CliError::Config("rate_loglog needs a bias_rate summary with points".into())
        })?;
    let slope = results.get("slope");
    let (a, b) = match slope {
        Some(s) if !s.is_null() => (
            s.get("intercept").and_then(Value::as_f64).unwrap_or(0.0),
            s.get("slope").and_then(Value::as_f64).unwrap_or(0.0),
        ),
        _ => (0.0, 0.0),
    };
    let mut rows = Vec::new();
    for p in points {
        let n = p
            .get("dimension")
            .and_then(Value::as_f64)
            .ok_or_else(|| CliError::Config("bias point without dimension".into()))?;
        let bias = p.get("bias").and_then(Value::as_f64).unwrap_or(f64::NAN);
        rows.push(vec![
            fmt(n),
            fmt(bias.ln()),
            fmt(a + b * n.ln()),
        ]);
    }
    build_csv(&["N", "log_bias", "fit_value"], &rows)
}
