use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hcrstat::data::{scan_panel, RowIssue};
use hcrstat::{ConsistencyMode, Field, FieldRegionPanel, Region};
use serde::Serialize;

use crate::{sha256_hex, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Breakdown {
    /// All 21 ESI fields present.
    Complete,
    /// Some ESI fields present, some missing.
    Partial,
    /// Only aggregate rows (`total` and/or `cross-field`).
    Aggregate,
}

/// One cell of the year × region coverage matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub year: i32,
    pub region: Region,
    pub breakdown: Breakdown,
    pub fields_present: usize,
    /// Listed only for partial breakdowns.
    pub missing_fields: Vec<Field>,
    pub has_total: bool,
    pub has_cross_field: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub path: PathBuf,
    pub sha256: String,
    /// Data rows read, valid or not.
    pub rows: usize,
    pub valid_rows: usize,
    pub violations: Vec<RowIssue>,
    /// Cross-row sum disagreements. Published sources disagree with each
    /// other, so these are informational unless strict mode is wanted.
    pub consistency_notes: Vec<String>,
    pub coverage: Vec<Coverage>,
}

impl ValidationSummary {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn gaps(&self) -> usize {
        self.coverage.iter().map(|c| c.missing_fields.len()).sum()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: {} rows, {} valid, {} violation(s)",
            self.path.display(),
            self.rows,
            self.valid_rows,
            self.violations.len()
        );
        for v in &self.violations {
            let _ = writeln!(s, "  line {}: {}", v.line, issue_text(v));
        }
        for c in &self.coverage {
            let gaps = if c.missing_fields.is_empty() {
                String::new()
            } else {
                let names: Vec<&str> = c.missing_fields.iter().map(|f| f.as_str()).collect();
                format!(", missing {}", names.join(", "))
            };
            let _ = writeln!(
                s,
                "  {} {}: {:?}, {} of 21 fields{gaps}",
                c.year, c.region, c.breakdown, c.fields_present
            );
        }
        for n in &self.consistency_notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

fn issue_text(issue: &RowIssue) -> String {
    match &issue.kind {
        hcrstat::data::IssueKind::Parse(m) => m.clone(),
        hcrstat::data::IssueKind::Violation(v) => v.to_string(),
    }
}

/// Reads the whole file and reports every problem instead of stopping at the
/// first one.
pub fn validate_input(path: &Path) -> Result<ValidationSummary, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let scan = scan_panel(bytes.as_slice()).map_err(|source| CliError::Data {
        context: path.display().to_string(),
        source,
    })?;
    let valid_rows = scan.rows.len();
    let panel = FieldRegionPanel::from_entries(scan.rows.iter().map(|&(_, k, c)| (k, c)), ConsistencyMode::PerSource)
        .expect("scan removed duplicates");
    let mut coverage = Vec::new();
    for year in panel.years() {
        for region in panel.regions_in(year) {
            let present = panel.esi_fields(year, region);
            let breakdown = match present.len() {
                0 => Breakdown::Aggregate,
                n if n == Field::ESI.len() => Breakdown::Complete,
                _ => Breakdown::Partial,
            };
            let missing_fields = if breakdown == Breakdown::Partial {
                Field::ESI.iter().copied().filter(|f| !present.contains(f)).collect()
            } else {
                Vec::new()
            };
            coverage.push(Coverage {
                year,
                region,
                breakdown,
                fields_present: present.len(),
                missing_fields,
                has_total: panel.get(year, region, Field::Total).is_some(),
                has_cross_field: panel.get(year, region, Field::CrossField).is_some(),
            });
        }
    }
    Ok(ValidationSummary {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
        rows: valid_rows + scan.issues.len(),
        valid_rows,
        violations: scan.issues,
        consistency_notes: panel.consistency_violations().iter().map(|v| v.to_string()).collect(),
        coverage,
    })
}
