use std::fmt::Write as _;
use std::path::Path;

use hcrstat::data::{field_distribution, round_half_up, LabeledTable, PAPER_PANEL_CSV, PAPER_TABLES_CSV};
use hcrstat::stat_tests::{SpearmanPMethod, WilcoxonOptions};
use hcrstat::{
    agreement_pipeline, chi_squared_test, derive_contingency, growth_summary, load_panel, paired_series,
    paper_reference_data, shapiro_wilk, shares, spearman_matrix, wilcoxon_signed_rank, AgreementOptions,
    AgreementResult, ChiSquaredResult, ContingencyTable, DataError, Field, FieldRegionPanel, GrowthSummary, LoaBand,
    LoaOptions, NormalityMethod, NormalityResult, PairedSeries, Region, ShareBreakdown, SpearmanMatrix,
    WeightScheme, WilcoxonResult,
};
use serde::Serialize;

use crate::config::{AnalysisConfig, InputSource};
use crate::plot::{sample_band, BAND_SAMPLES};
use crate::{sha256_hex, CliError};

pub const SCHEMA_VERSION: u32 = 1;

/// A loaded panel plus what is needed to stamp it into a report.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub source: String,
    pub sha256: String,
    pub panel: FieldRegionPanel,
    /// Published contingency tables; empty unless the bundled data is used.
    pub tables: Vec<LabeledTable>,
}

pub fn load_dataset(input: &InputSource) -> Result<Dataset, CliError> {
    match input {
        InputSource::PaperData => {
            let reference = paper_reference_data();
            let mut bytes = PAPER_PANEL_CSV.as_bytes().to_vec();
            bytes.extend_from_slice(PAPER_TABLES_CSV.as_bytes());
            Ok(Dataset {
                source: "paper-data".into(),
                sha256: sha256_hex(&bytes),
                panel: reference.panel,
                tables: reference.tables,
            })
        }
        InputSource::Path(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
            let panel = load_panel(bytes.as_slice()).map_err(|source| CliError::Data {
                context: path.display().to_string(),
                source,
            })?;
            Ok(Dataset {
                source: path.display().to_string(),
                sha256: sha256_hex(&bytes),
                panel,
                tables: Vec::new(),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub counts: Vec<CountRow>,
    pub shares: Vec<ShareBreakdown>,
    pub growth: Option<GrowthSummary>,
    pub chi_squared: Vec<ChiSquaredEntry>,
    pub normality: Vec<NormalityEntry>,
    pub spearman: Option<SpearmanSection>,
    pub wilcoxon: Vec<WilcoxonEntry>,
    pub agreement: Option<AgreementSection>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: AnalysisConfig,
    pub dataset: DatasetInfo,
    pub modes: ModeStamp,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub source: String,
    pub sha256: String,
    pub entries: usize,
    pub years: Vec<i32>,
    pub has_field_breakdown: bool,
}

/// The settings every number in the report was computed under.
#[derive(Debug, Clone, Serialize)]
pub struct ModeStamp {
    pub paper_compat: bool,
    pub loa: LoaOptions,
    /// Numeric SD scale factor in effect.
    pub sd_scale: f64,
    pub weights: WeightScheme,
    pub ci_level: f64,
    pub bootstrap: Option<BootstrapStamp>,
    pub chi_squared_yates: bool,
    pub field_normality: NormalityMethod,
    pub residual_normality: NormalityMethod,
    pub spearman_p: SpearmanPMethod,
    pub wilcoxon: WilcoxonOptions,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapStamp {
    pub seed: u64,
    pub n_resamples: usize,
}

/// Yearly region totals; a side is absent when the panel cannot give it.
#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub year: i32,
    pub region: Region,
    pub with_cross_field: Option<u64>,
    pub without_cross_field: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableSource {
    Published,
    Derived,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiSquaredEntry {
    pub label: String,
    pub source: TableSource,
    pub table: ContingencyTable,
    pub result: ChiSquaredResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityEntry {
    pub label: String,
    pub region: Region,
    pub year: i32,
    pub result: NormalityResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub label: String,
    pub region: Region,
    pub year: i32,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpearmanSection {
    /// Row order of every series.
    pub fields: Vec<Field>,
    pub series: Vec<SeriesEntry>,
    pub matrix: SpearmanMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct WilcoxonEntry {
    pub region: Region,
    pub year_a: i32,
    pub year_b: i32,
    pub result: WilcoxonResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementSection {
    pub year_a: i32,
    pub year_b: i32,
    pub regions: Vec<Region>,
    pub result: AgreementResult,
    /// Evenly spaced over the observed M1 range.
    pub band: Vec<LoaBand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    /// The input lacks what the section needs.
    Skipped,
    /// The statistic is undefined for this input.
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub section: &'static str,
    pub kind: DiagnosticKind,
    pub operation: Option<&'static str>,
    pub message: String,
}

impl AnalysisReport {
    pub fn degenerate(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.kind == DiagnosticKind::Degenerate)
    }

    pub fn chi_squared_for(&self, label: &str) -> Option<&ChiSquaredResult> {
        self.chi_squared.iter().find(|c| c.label == label).map(|c| &c.result)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    fn skip(&mut self, section: &'static str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            section,
            kind: DiagnosticKind::Skipped,
            operation: None,
            message: message.into(),
        });
    }

    fn degenerate(&mut self, section: &'static str, operation: &'static str, message: impl ToString) {
        self.0.push(Diagnostic {
            section,
            kind: DiagnosticKind::Degenerate,
            operation: Some(operation),
            message: message.to_string(),
        });
    }
}

/// Validates `config`, loads its input and runs every section.
pub fn run_analysis(config: &AnalysisConfig) -> Result<AnalysisReport, CliError> {
    config.validate()?;
    let dataset = load_dataset(&config.input)?;
    run_analysis_on(&dataset, config)
}

/// Runs every section on an already loaded dataset.
///
/// Missing inputs and degenerate statistics do not abort the run; they are
/// recorded in `diagnostics` and the affected section is left empty.
pub fn run_analysis_on(dataset: &Dataset, config: &AnalysisConfig) -> Result<AnalysisReport, CliError> {
    config.validate()?;
    let panel = &dataset.panel;
    let mut diag = Diagnostics(Vec::new());
    let (ya, yb) = (config.year_a, config.year_b);

    let counts = count_rows(panel);
    let shares = share_rows(panel);
    let growth = match growth_summary(panel) {
        Ok(g) => Some(g),
        Err(e) => {
            diag.skip("growth", e.to_string());
            None
        }
    };
    let chi_squared = chi_squared_section(dataset, config, &mut diag);

    let field_level = panel.has_field_breakdown();
    let mut normality = Vec::new();
    let mut series = Vec::new();
    let mut wilcoxon = Vec::new();
    let mut agreement = None;
    if !field_level {
        for section in ["normality", "spearman", "wilcoxon", "agreement"] {
            diag.skip(section, "panel has no per-field rows");
        }
    } else {
        for &region in &config.regions {
            for year in [ya, yb] {
                let label = format!("{region}/{year}");
                let values = match field_distribution(panel, region, year) {
                    Ok(v) => v,
                    Err(e) => {
                        diag.skip("normality", format!("{label}: {e}"));
                        continue;
                    }
                };
                match shapiro_wilk(&values) {
                    Ok(result) => normality.push(NormalityEntry {
                        label: label.clone(),
                        region,
                        year,
                        result,
                    }),
                    Err(e) => diag.degenerate("normality", "shapiro_wilk", format!("{label}: {e}")),
                }
                series.push(SeriesEntry {
                    label,
                    region,
                    year,
                    values,
                });
            }
        }

        let mut pairs = Vec::new();
        for &region in &config.regions {
            match paired_series(panel, region, ya, yb) {
                Ok(p) => {
                    match wilcoxon_signed_rank(&p) {
                        Ok(result) => wilcoxon.push(WilcoxonEntry {
                            region,
                            year_a: ya,
                            year_b: yb,
                            result,
                        }),
                        Err(e) => diag.degenerate("wilcoxon", "wilcoxon_signed_rank", format!("{region}: {e}")),
                    }
                    pairs.push(p);
                }
                Err(e) => diag.skip("wilcoxon", format!("{region}: {e}")),
            }
        }

        if pairs.len() == config.regions.len() {
            agreement = agreement_section(&pairs, config, &mut diag);
        } else {
            diag.skip(
                "agreement",
                format!("paired series available for {} of {} regions", pairs.len(), config.regions.len()),
            );
        }
    }

    let spearman = if series.len() >= 2 {
        let labels: Vec<String> = series.iter().map(|s| s.label.clone()).collect();
        let values: Vec<Vec<f64>> = series.iter().map(|s| s.values.clone()).collect();
        match spearman_matrix(&values, &labels) {
            Ok(matrix) => Some(SpearmanSection {
                fields: Field::ESI.to_vec(),
                series,
                matrix,
            }),
            Err(e) => {
                diag.degenerate("spearman", "spearman_matrix", e);
                None
            }
        }
    } else {
        if field_level {
            diag.skip("spearman", format!("{} complete region-year series, need 2", series.len()));
        }
        None
    };

    let loa = config.loa_options();
    let metadata = Metadata {
        tool: "hcrstat",
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        dataset: DatasetInfo {
            source: dataset.source.clone(),
            sha256: dataset.sha256.clone(),
            entries: panel.len(),
            years: panel.years().into_iter().collect(),
            has_field_breakdown: field_level,
        },
        modes: ModeStamp {
            paper_compat: config.paper_compat,
            loa,
            sd_scale: loa.scale.value(),
            weights: config.weights,
            ci_level: AgreementOptions::default().ci_level,
            bootstrap: config.bootstrap().map(|(seed, n_resamples)| BootstrapStamp { seed, n_resamples }),
            chi_squared_yates: false,
            field_normality: NormalityMethod::ShapiroWilk,
            residual_normality: NormalityMethod::KsLilliefors,
            spearman_p: SpearmanPMethod::TApprox,
            wilcoxon: WilcoxonOptions::default(),
        },
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        metadata,
        counts,
        shares,
        growth,
        chi_squared,
        normality,
        spearman,
        wilcoxon,
        agreement,
        diagnostics: diag.0,
    })
}

fn count_rows(panel: &FieldRegionPanel) -> Vec<CountRow> {
    let mut out = Vec::new();
    for year in panel.years() {
        for region in Region::ALL {
            let with = panel.region_total(year, region, true).ok();
            let without = panel.region_total(year, region, false).ok();
            if with.is_some() || without.is_some() {
                out.push(CountRow {
                    year,
                    region,
                    with_cross_field: with,
                    without_cross_field: without,
                });
            }
        }
    }
    out
}

/// Shares for every year with a regional breakdown; the cross-field variant
/// only where cross-field rows exist.
fn share_rows(panel: &FieldRegionPanel) -> Vec<ShareBreakdown> {
    let mut out = Vec::new();
    for year in panel.years() {
        let Ok(base) = shares(panel, year, false) else { continue };
        out.push(base);
        let has_cross = Region::PARTS.iter().any(|&r| panel.get(year, r, Field::CrossField).is_some());
        if has_cross {
            if let Ok(with) = shares(panel, year, true) {
                out.push(with);
            }
        }
    }
    out
}

fn chi_squared_section(dataset: &Dataset, config: &AnalysisConfig, diag: &mut Diagnostics) -> Vec<ChiSquaredEntry> {
    let tables: Vec<(String, TableSource, Result<ContingencyTable, DataError>)> = if dataset.tables.is_empty() {
        config
            .regions
            .iter()
            .filter(|&&r| r != Region::World)
            .map(|&r| {
                let label = format!("{r}/{}-{}", config.year_a, config.year_b);
                (label, TableSource::Derived, derive_contingency(&dataset.panel, r, &[config.year_a, config.year_b]))
            })
            .collect()
    } else {
        dataset
            .tables
            .iter()
            .map(|t| (t.id.clone(), TableSource::Published, Ok(t.table.clone())))
            .collect()
    };
    let mut out = Vec::new();
    for (label, source, table) in tables {
        let table = match table {
            Ok(t) => t,
            Err(e) => {
                diag.skip("chi_squared", format!("{label}: {e}"));
                continue;
            }
        };
        match chi_squared_test(&table) {
            Ok(result) => out.push(ChiSquaredEntry {
                label,
                source,
                table,
                result,
            }),
            Err(e) => diag.degenerate("chi_squared", "chi_squared_test", format!("{label}: {e}")),
        }
    }
    out
}

fn agreement_section(pairs: &[PairedSeries], config: &AnalysisConfig, diag: &mut Diagnostics) -> Option<AgreementSection> {
    let all = match PairedSeries::concat(pairs) {
        Ok(p) => p,
        Err(e) => {
            diag.skip("agreement", e.to_string());
            return None;
        }
    };
    let options = AgreementOptions {
        weights: config.weights,
        bootstrap: config.bootstrap(),
        loa: config.loa_options(),
        ..AgreementOptions::default()
    };
    let result = match agreement_pipeline(&all, &options) {
        Ok(r) => r,
        Err(e) => {
            diag.degenerate("agreement", e.operation(), e);
            return None;
        }
    };
    let (lo, hi) = all
        .m1()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let band = match sample_band(&result.loa, result.fit.line(), (lo, hi), BAND_SAMPLES) {
        Ok(b) => b,
        Err(e) => {
            diag.degenerate("agreement", "loa_band", e);
            return None;
        }
    };
    Some(AgreementSection {
        year_a: config.year_a,
        year_b: config.year_b,
        regions: config.regions.clone(),
        result,
        band,
    })
}

fn pct(x: f64) -> f64 {
    round_half_up(x * 100.0, 2)
}

/// Short human-readable digest; the only place numbers are rounded.
pub fn render_summary(report: &AnalysisReport) -> String {
    let mut s = String::new();
    let m = &report.metadata;
    let _ = writeln!(s, "dataset {} (sha256 {})", m.dataset.source, &m.dataset.sha256[..12]);
    for c in &report.chi_squared {
        let r = &c.result;
        let _ = writeln!(s, "chi-squared {}: {:.2}, df {}, p {:.4}", c.label, r.statistic, r.df, r.p_value);
    }
    if let Some(g) = &report.growth {
        for step in &g.steps {
            let _ = writeln!(
                s,
                "growth {}->{}: {:.2}% (21 fields), {:.2}% (with cross-field)",
                step.from_year,
                step.to_year,
                pct(step.growth_without_cross_field()),
                pct(step.growth_with_cross_field())
            );
        }
    }
    for b in &report.shares {
        let parts: Vec<String> = b.regions.iter().map(|r| format!("{} {:.2}%", r.region, r.percent_2dp())).collect();
        let cf = if b.include_cross_field { " with cross-field" } else { "" };
        let _ = writeln!(s, "shares {}{cf}: {}", b.year, parts.join(", "));
    }
    for n in &report.normality {
        let _ = writeln!(s, "shapiro-wilk {}: W {:.4}, p {:.4}", n.label, n.result.statistic, n.result.p_value);
    }
    for w in &report.wilcoxon {
        let _ = writeln!(s, "wilcoxon {}: p {:.4}", w.region, w.result.p_value);
    }
    if let Some(a) = &report.agreement {
        let fit = &a.result.fit;
        let _ = writeln!(s, "wlp: M2 = {:.4} M1 + {:.4} (n {})", fit.slope, fit.intercept, fit.n);
        let loa = &a.result.loa;
        let _ = writeln!(s, "|residual| = {:.4} + {:.4} M1", loa.a, loa.b);
        let crossings: usize = a.result.thresholds.iter().map(|t| t.crossings.len()).sum();
        let _ = writeln!(s, "threshold crossings (all edge sets): {crossings}");
    }
    for d in &report.diagnostics {
        let kind = match d.kind {
            DiagnosticKind::Skipped => "skipped",
            DiagnosticKind::Degenerate => "degenerate",
        };
        let op = d.operation.map(|o| format!(" [{o}]")).unwrap_or_default();
        let _ = writeln!(s, "{kind} {}{op}: {}", d.section, d.message);
    }
    s
}

/// Writes `report` as JSON to `path`.
pub fn write_report(report: &AnalysisReport, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, report.to_json()).map_err(|e| CliError::io(path, e))
}
