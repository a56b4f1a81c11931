//! Plot-ready CSV series. Every value is copied from the report; nothing
//! here computes statistics except [`sample_band`], which the report itself
//! uses to fill its band samples.

use std::path::Path;

use hcrstat::{loa_band, AgreementError, Line, LoaBand, LoaModel};
use serde::Serialize;

use crate::report::AnalysisReport;
use crate::{sha256_hex, CliError};

pub const BAND_SAMPLES: usize = 200;

pub const FIG1: &str = "fig1_counts.csv";
pub const FIG2: &str = "fig2_shares.csv";
pub const FIG3: &str = "fig3_scatter.csv";
pub const FIG4: &str = "fig4_band.csv";
pub const MANIFEST: &str = "manifest.json";

const BAND_HEADER: [&str; 10] = [
    "m1",
    "fitted",
    "sd",
    "lower",
    "upper",
    "error_term",
    "lower_inner",
    "lower_outer",
    "upper_inner",
    "upper_outer",
];

/// Band at `n` evenly spaced M1 values from `range.0` to `range.1` inclusive.
pub fn sample_band(model: &LoaModel, line: Line, range: (f64, f64), n: usize) -> Result<Vec<LoaBand>, AgreementError> {
    let (lo, hi) = range;
    if n < 2 || !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(AgreementError::InvalidArgument(format!("band range ({lo}, {hi}) with {n} samples")));
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            // endpoints exact, interior points lo + i * step
            let m1 = if i == n - 1 { hi } else { lo + i as f64 * (hi - lo) / last };
            loa_band(model, line, m1)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestFile {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmittedFile {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlotManifest {
    pub schema_version: u32,
    pub dataset_sha256: String,
    pub files: Vec<ManifestFile>,
    pub omitted: Vec<OmittedFile>,
}

impl PlotManifest {
    pub fn file(&self, name: &str) -> Option<&ManifestFile> {
        self.files.iter().find(|f| f.file == name)
    }
}

type Rows = Vec<Vec<String>>;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn fig1(report: &AnalysisReport) -> Rows {
    let mut rows = vec![vec!["year".into(), "region".into(), "with_cross_field".into(), "without_cross_field".into()]];
    for c in &report.counts {
        rows.push(vec![c.year.to_string(), c.region.to_string(), opt(c.with_cross_field), opt(c.without_cross_field)]);
    }
    rows
}

fn fig2(report: &AnalysisReport) -> Rows {
    let mut rows = vec![["year", "include_cross_field", "region", "count", "share", "percent_2dp"]
        .map(String::from)
        .to_vec()];
    for b in &report.shares {
        for r in &b.regions {
            rows.push(vec![
                b.year.to_string(),
                b.include_cross_field.to_string(),
                r.region.to_string(),
                r.count.to_string(),
                r.share.to_string(),
                format!("{:.2}", r.percent_2dp()),
            ]);
        }
    }
    rows
}

/// Wide layout: one row per field, one column per region-year series.
fn fig3(report: &AnalysisReport) -> Option<Rows> {
    let sp = report.spearman.as_ref()?;
    let mut header = vec!["field".to_string()];
    header.extend(sp.series.iter().map(|s| s.label.clone()));
    let mut rows = vec![header];
    for (i, field) in sp.fields.iter().enumerate() {
        let mut row = vec![field.to_string()];
        row.extend(sp.series.iter().map(|s| s.values[i].to_string()));
        rows.push(row);
    }
    Some(rows)
}

fn band_rows(band: &[LoaBand]) -> Rows {
    let mut rows = vec![BAND_HEADER.map(String::from).to_vec()];
    for b in band {
        rows.push(
            [b.m1, b.fitted, b.sd, b.lower, b.upper, b.error_term, b.lower_inner, b.lower_outer, b.upper_inner, b.upper_outer]
                .iter()
                .map(f64::to_string)
                .collect(),
        );
    }
    rows
}

/// Band table as CSV text, the `fig4_band.csv` layout.
pub fn band_csv(band: &[LoaBand]) -> String {
    to_csv(&band_rows(band))
}

/// Writes the figure CSVs and `manifest.json` into `dir`, creating it.
///
/// A figure whose report section is empty is omitted and listed under
/// `omitted` with the reason.
pub fn emit_plot_data(report: &AnalysisReport, dir: &Path) -> Result<PlotManifest, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut manifest = PlotManifest {
        schema_version: crate::report::SCHEMA_VERSION,
        dataset_sha256: report.metadata.dataset.sha256.clone(),
        files: Vec::new(),
        omitted: Vec::new(),
    };
    let section_reason = |section: &str| {
        report
            .diagnostics
            .iter()
            .find(|d| d.section == section)
            .map_or_else(|| format!("{section} section is empty"), |d| format!("{section} section is empty: {}", d.message))
    };
    let figures: [(&str, Option<Rows>, String); 4] = [
        (FIG1, Some(fig1(report)).filter(|r| r.len() > 1), "no region totals".into()),
        (FIG2, Some(fig2(report)).filter(|r| r.len() > 1), "no regional share breakdown".into()),
        (FIG3, fig3(report), section_reason("spearman")),
        (FIG4, report.agreement.as_ref().map(|a| band_rows(&a.band)), section_reason("agreement")),
    ];
    for (name, rows, reason) in figures {
        let path = dir.join(name);
        match rows {
            Some(rows) => {
                let text = to_csv(&rows);
                std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
                manifest.files.push(ManifestFile {
                    file: name.into(),
                    sha256: sha256_hex(text.as_bytes()),
                    rows: rows.len() - 1,
                });
            }
            None => {
                // a stale file from an earlier run would contradict the manifest
                if path.exists() {
                    std::fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
                }
                manifest.omitted.push(OmittedFile {
                    file: name.into(),
                    reason,
                });
            }
        }
    }
    let path = dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}
