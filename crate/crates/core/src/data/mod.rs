//! HCR count panels and the summaries built from them.
//!
//! A [`FieldRegionPanel`] maps `(year, region, field)` to a nonnegative count.
//! Everything else in this module is a pure function of a panel:
//! contingency tables for the independence tests, regional share
//! breakdowns, year-over-year growth, and aligned [`PairedSeries`] for the
//! method-agreement analysis.

mod ids;
mod panel_csv;
mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use ids::{Field, Region, UnknownField, UnknownRegion};
pub use panel_csv::{load_panel, load_panel_with_mode, scan_panel, IssueKind, PanelScan, RowIssue, PANEL_HEADER};
pub use reference::{paper_reference_data, LabeledTable, PaperReference, ReferenceTotals, PAPER_PANEL_CSV, PAPER_TABLES_CSV};

/// Errors raised while reading or querying panel data.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{}{violation}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<u64>, violation: Violation },
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("invalid contingency table: {0}")]
    InvalidTable(String),
    #[error("invalid paired series: {0}")]
    InvalidSeries(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A single rule a panel row, or a group of rows, breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Violation {
    UnknownRegion(String),
    UnknownField(String),
    NegativeCount(String),
    DuplicateKey(PanelKey),
    Inconsistent(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownRegion(r) => write!(f, "unknown region `{r}`"),
            Violation::UnknownField(x) => write!(f, "unknown field `{x}`"),
            Violation::NegativeCount(c) => write!(f, "negative count {c}"),
            Violation::DuplicateKey(k) => write!(f, "duplicate key ({k})"),
            Violation::Inconsistent(m) => write!(f, "inconsistent panel: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PanelKey {
    pub year: i32,
    pub region: Region,
    pub field: Field,
}

impl PanelKey {
    pub fn new(year: i32, region: Region, field: Field) -> Self {
        Self { year, region, field }
    }
}

impl fmt::Display for PanelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.year, self.region, self.field)
    }
}

/// How strictly cross-row sums are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsistencyMode {
    /// `world` must equal `us + chinese-mainland + other` wherever all four
    /// are present, and a `total` row must equal its per-field rows when the
    /// full breakdown is present.
    Strict,
    /// Values are stored as given. Published figures that disagree with
    /// each other can coexist.
    #[default]
    PerSource,
}

/// Integer HCR counts indexed by `(year, region, field)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldRegionPanel {
    entries: BTreeMap<PanelKey, u64>,
    mode: ConsistencyMode,
}

impl FieldRegionPanel {
    /// Builds a panel, rejecting duplicate keys and (in strict mode) sum
    /// inconsistencies.
    pub fn from_entries<I>(entries: I, mode: ConsistencyMode) -> Result<Self, DataError>
    where
        I: IntoIterator<Item = (PanelKey, u64)>,
    {
        let mut map = BTreeMap::new();
        for (key, count) in entries {
            if map.insert(key, count).is_some() {
                return Err(DataError::Validation {
                    line: None,
                    violation: Violation::DuplicateKey(key),
                });
            }
        }
        let panel = Self { entries: map, mode };
        if mode == ConsistencyMode::Strict {
            if let Some(v) = panel.consistency_violations().into_iter().next() {
                return Err(DataError::Validation { line: None, violation: v });
            }
        }
        Ok(panel)
    }

    pub fn mode(&self) -> ConsistencyMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, year: i32, region: Region, field: Field) -> Option<u64> {
        self.entries.get(&PanelKey::new(year, region, field)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PanelKey, &u64)> {
        self.entries.iter()
    }

    pub fn years(&self) -> BTreeSet<i32> {
        self.entries.keys().map(|k| k.year).collect()
    }

    pub fn regions_in(&self, year: i32) -> BTreeSet<Region> {
        self.entries.keys().filter(|k| k.year == year).map(|k| k.region).collect()
    }

    /// ESI fields present for a region-year.
    pub fn esi_fields(&self, year: i32, region: Region) -> BTreeSet<Field> {
        Field::ESI
            .into_iter()
            .filter(|&f| self.get(year, region, f).is_some())
            .collect()
    }

    /// True when at least one per-field ESI row exists anywhere.
    pub fn has_field_breakdown(&self) -> bool {
        self.entries.keys().any(|k| k.field.is_esi())
    }

    /// Total HCR count of a region in a year.
    ///
    /// A `total` row wins when present; the excluding-cross-field figure is
    /// then `total - cross-field` (a missing cross-field row counts as 0).
    /// Otherwise the total is the sum of all 21 ESI rows, plus the
    /// cross-field row when requested.
    pub fn region_total(&self, year: i32, region: Region, include_cross_field: bool) -> Result<u64, DataError> {
        let cross = self.get(year, region, Field::CrossField).unwrap_or(0);
        if let Some(total) = self.get(year, region, Field::Total) {
            return if include_cross_field {
                Ok(total)
            } else {
                total.checked_sub(cross).ok_or_else(|| {
                    DataError::Validation {
                        line: None,
                        violation: Violation::Inconsistent(format!(
                            "{year} {region}: cross-field count {cross} exceeds total {total}"
                        )),
                    }
                })
            };
        }
        let mut sum = 0u64;
        let mut missing = Vec::new();
        for f in Field::ESI {
            match self.get(year, region, f) {
                Some(c) => sum += c,
                None => missing.push(f.as_str()),
            }
        }
        if !missing.is_empty() {
            return Err(DataError::MissingData(format!(
                "no total for {year} {region} (missing fields: {})",
                missing.join(", ")
            )));
        }
        Ok(if include_cross_field { sum + cross } else { sum })
    }

    /// Every cross-row sum rule the panel breaks, regardless of mode.
    pub fn consistency_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let cells: BTreeSet<(i32, Field)> = self.entries.keys().map(|k| (k.year, k.field)).collect();
        for (year, field) in cells {
            let world = self.get(year, Region::World, field);
            let parts: Option<Vec<u64>> = Region::PARTS.iter().map(|&r| self.get(year, r, field)).collect();
            if let (Some(world), Some(parts)) = (world, parts) {
                let sum: u64 = parts.iter().sum();
                if sum != world {
                    out.push(Violation::Inconsistent(format!(
                        "{year} {field}: world {world} != regional sum {sum}"
                    )));
                }
            }
        }
        let region_years: BTreeSet<(i32, Region)> = self.entries.keys().map(|k| (k.year, k.region)).collect();
        for (year, region) in region_years {
            let Some(total) = self.get(year, region, Field::Total) else { continue };
            let esi: Option<Vec<u64>> = Field::ESI.iter().map(|&f| self.get(year, region, f)).collect();
            if let Some(esi) = esi {
                let sum = esi.iter().sum::<u64>() + self.get(year, region, Field::CrossField).unwrap_or(0);
                if sum != total {
                    out.push(Violation::Inconsistent(format!(
                        "{year} {region}: total {total} != field sum {sum}"
                    )));
                }
            }
        }
        out
    }
}

/// r×c table of nonnegative counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    rows: Vec<Vec<u64>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<Vec<u64>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self, DataError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r < 2 || c < 2 {
            return Err(DataError::InvalidTable(format!("need at least 2x2, got {r}x{c}")));
        }
        if let Some(i) = rows.iter().position(|row| row.len() != c) {
            return Err(DataError::InvalidTable(format!("row {i} has {} cells, expected {c}", rows[i].len())));
        }
        if row_labels.len() != r || col_labels.len() != c {
            return Err(DataError::InvalidTable("label count does not match table shape".into()));
        }
        if rows.iter().flatten().all(|&x| x == 0) {
            return Err(DataError::InvalidTable("grand total is zero".into()));
        }
        Ok(Self { rows, row_labels, col_labels })
    }

    /// Builds a table with generated labels (`r1..`, `c1..`).
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self, DataError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::new(
            rows,
            (1..=r).map(|i| format!("r{i}")).collect(),
            (1..=c).map(|j| format!("c{j}")).collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.n_cols()).map(|j| self.rows.iter().map(|r| r[j]).sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().flatten().sum()
    }
}

/// 2×|years| table: the region's count against the rest of the world.
pub fn derive_contingency(panel: &FieldRegionPanel, region: Region, years: &[i32]) -> Result<ContingencyTable, DataError> {
    let mut inside = Vec::with_capacity(years.len());
    let mut outside = Vec::with_capacity(years.len());
    for &year in years {
        let world = panel.region_total(year, Region::World, true)?;
        let count = panel.region_total(year, region, true)?;
        let rest = world.checked_sub(count).ok_or_else(|| DataError::Validation {
            line: None,
            violation: Violation::Inconsistent(format!("{year}: {region} count {count} exceeds world {world}")),
        })?;
        inside.push(count);
        outside.push(rest);
    }
    ContingencyTable::new(
        vec![inside, outside],
        vec![region.to_string(), format!("not-{region}")],
        years.iter().map(|y| y.to_string()).collect(),
    )
}

/// Aligned method-1 / method-2 measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    labels: Vec<String>,
    m1: Vec<f64>,
    m2: Vec<f64>,
}

impl PairedSeries {
    pub fn new(labels: Vec<String>, m1: Vec<f64>, m2: Vec<f64>) -> Result<Self, DataError> {
        if m1.len() != m2.len() || labels.len() != m1.len() {
            return Err(DataError::InvalidSeries(format!(
                "length mismatch: {} labels, {} m1, {} m2",
                labels.len(),
                m1.len(),
                m2.len()
            )));
        }
        if m1.len() < 3 {
            return Err(DataError::InvalidSeries(format!("need at least 3 pairs, got {}", m1.len())));
        }
        if m1.iter().chain(&m2).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(DataError::InvalidSeries("values must be finite and nonnegative".into()));
        }
        Ok(Self { labels, m1, m2 })
    }

    /// Unlabelled pairs; labels become `#0, #1, ...`.
    pub fn from_values(m1: Vec<f64>, m2: Vec<f64>) -> Result<Self, DataError> {
        let labels = (0..m1.len()).map(|i| format!("#{i}")).collect();
        Self::new(labels, m1, m2)
    }

    pub fn len(&self) -> usize {
        self.m1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m1.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn m1(&self) -> &[f64] {
        &self.m1
    }

    pub fn m2(&self) -> &[f64] {
        &self.m2
    }

    pub fn differences(&self) -> Vec<f64> {
        self.m2.iter().zip(&self.m1).map(|(b, a)| b - a).collect()
    }

    /// Exchanges the roles of the two methods.
    pub fn swapped(&self) -> Self {
        Self {
            labels: self.labels.clone(),
            m1: self.m2.clone(),
            m2: self.m1.clone(),
        }
    }

    /// Concatenates several series (e.g. one per region) into one sample.
    pub fn concat(parts: &[PairedSeries]) -> Result<Self, DataError> {
        let mut labels = Vec::new();
        let mut m1 = Vec::new();
        let mut m2 = Vec::new();
        for p in parts {
            labels.extend(p.labels.iter().cloned());
            m1.extend_from_slice(&p.m1);
            m2.extend_from_slice(&p.m2);
        }
        Self::new(labels, m1, m2)
    }
}

/// The 21 ESI field counts of one region in two years, canonical order.
pub fn paired_series(panel: &FieldRegionPanel, region: Region, year_a: i32, year_b: i32) -> Result<PairedSeries, DataError> {
    let mut labels = Vec::with_capacity(Field::ESI.len());
    let mut m1 = Vec::with_capacity(Field::ESI.len());
    let mut m2 = Vec::with_capacity(Field::ESI.len());
    let mut missing = Vec::new();
    for field in Field::ESI {
        match (panel.get(year_a, region, field), panel.get(year_b, region, field)) {
            (Some(a), Some(b)) => {
                labels.push(format!("{region}/{field}"));
                m1.push(a as f64);
                m2.push(b as f64);
            }
            (a, b) => {
                if a.is_none() {
                    missing.push(format!("{year_a} {region} {field}"));
                }
                if b.is_none() {
                    missing.push(format!("{year_b} {region} {field}"));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(DataError::MissingData(missing.join("; ")));
    }
    PairedSeries::new(labels, m1, m2)
}

/// Per-field counts of one region-year as reals, canonical ESI order.
pub fn field_distribution(panel: &FieldRegionPanel, region: Region, year: i32) -> Result<Vec<f64>, DataError> {
    Field::ESI
        .iter()
        .map(|&f| {
            panel
                .get(year, region, f)
                .map(|c| c as f64)
                .ok_or_else(|| DataError::MissingData(format!("{year} {region} {f}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionShare {
    pub region: Region,
    pub count: u64,
    pub share: f64,
}

impl RegionShare {
    /// Share in percent, rounded half-up to two decimals (display only).
    pub fn percent_2dp(&self) -> f64 {
        round_half_up(self.share * 100.0, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareBreakdown {
    pub year: i32,
    pub include_cross_field: bool,
    pub regions: Vec<RegionShare>,
    pub total: u64,
}

impl ShareBreakdown {
    pub fn get(&self, region: Region) -> Option<&RegionShare> {
        self.regions.iter().find(|r| r.region == region)
    }
}

/// Shares of us / chinese-mainland / other within their combined total.
pub fn shares(panel: &FieldRegionPanel, year: i32, include_cross_field: bool) -> Result<ShareBreakdown, DataError> {
    let counts = Region::PARTS
        .iter()
        .map(|&r| panel.region_total(year, r, include_cross_field).map(|c| (r, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let total: u64 = counts.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return Err(DataError::MissingData(format!("{year}: regional counts sum to zero")));
    }
    let regions = counts
        .into_iter()
        .map(|(region, count)| RegionShare {
            region,
            count,
            share: count as f64 / total as f64,
        })
        .collect();
    Ok(ShareBreakdown {
        year,
        include_cross_field,
        regions,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearTotal {
    pub year: i32,
    pub with_cross_field: u64,
    pub without_cross_field: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthStep {
    pub from_year: i32,
    pub to_year: i32,
    /// `total(to) / total(from)` counting cross-field HCRs in both years.
    pub ratio_with_cross_field: f64,
    /// Same ratio over the 21 ESI fields only.
    pub ratio_without_cross_field: f64,
}

impl GrowthStep {
    pub fn growth_without_cross_field(&self) -> f64 {
        self.ratio_without_cross_field - 1.0
    }

    pub fn growth_with_cross_field(&self) -> f64 {
        self.ratio_with_cross_field - 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub totals: Vec<YearTotal>,
    pub steps: Vec<GrowthStep>,
}

impl GrowthSummary {
    pub fn step(&self, from_year: i32, to_year: i32) -> Option<&GrowthStep> {
        self.steps.iter().find(|s| s.from_year == from_year && s.to_year == to_year)
    }
}

/// World totals per year and ratios between consecutive years that have one.
pub fn growth_summary(panel: &FieldRegionPanel) -> Result<GrowthSummary, DataError> {
    let mut totals = Vec::new();
    for year in panel.years() {
        let (Ok(with), Ok(without)) = (
            panel.region_total(year, Region::World, true),
            panel.region_total(year, Region::World, false),
        ) else {
            continue;
        };
        totals.push(YearTotal {
            year,
            with_cross_field: with,
            without_cross_field: without,
        });
    }
    if totals.len() < 2 {
        return Err(DataError::MissingData(format!(
            "world totals for at least 2 years required, found {}",
            totals.len()
        )));
    }
    if let Some(t) = totals.iter().find(|t| t.with_cross_field == 0 || t.without_cross_field == 0) {
        return Err(DataError::MissingData(format!("{}: world total is zero", t.year)));
    }
    let steps = totals
        .windows(2)
        .map(|w| GrowthStep {
            from_year: w[0].year,
            to_year: w[1].year,
            ratio_with_cross_field: w[1].with_cross_field as f64 / w[0].with_cross_field as f64,
            ratio_without_cross_field: w[1].without_cross_field as f64 / w[0].without_cross_field as f64,
        })
        .collect();
    Ok(GrowthSummary { totals, steps })
}

/// Rounds half-up (away from zero for positives) at `decimals` places.
///
/// Values within 1e-9 of a tie after scaling are treated as the tie, so
/// binary representation error does not flip e.g. `6.845` down.
pub fn round_half_up(x: f64, decimals: u32) -> f64 {
    let factor = 10f64.powi(decimals as i32);
    let scaled = x * factor;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let rounded = if (frac - 0.5).abs() < 1e-9 || frac > 0.5 { floor + 1.0 } else { floor };
    rounded / factor
}
