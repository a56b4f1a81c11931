//! Panel CSV: `year,region,field,count`, `#` comment lines, UTF-8.

use std::io::Read;

use serde::Serialize;

use super::{ConsistencyMode, DataError, Field, FieldRegionPanel, PanelKey, Region, Violation};

pub const PANEL_HEADER: [&str; 4] = ["year", "region", "field", "count"];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "detail", rename_all = "kebab-case")]
pub enum IssueKind {
    Parse(String),
    Violation(Violation),
}

/// A problem attached to a 1-based input line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowIssue {
    pub line: u64,
    pub kind: IssueKind,
}

impl RowIssue {
    fn into_error(self) -> DataError {
        match self.kind {
            IssueKind::Parse(message) => DataError::Parse { line: self.line, message },
            IssueKind::Violation(violation) => DataError::Validation {
                line: Some(self.line),
                violation,
            },
        }
    }
}

/// Result of reading a panel file without stopping at the first problem.
#[derive(Debug, Clone, Default)]
pub struct PanelScan {
    pub rows: Vec<(u64, PanelKey, u64)>,
    pub issues: Vec<RowIssue>,
}

/// Reads every row, collecting all parse errors and row-level violations.
///
/// A bad header or an unreadable stream is a hard error.
pub fn scan_panel<R: Read>(source: R) -> Result<PanelScan, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut scan = PanelScan::default();
    let mut seen: std::collections::BTreeMap<PanelKey, u64> = Default::default();
    let mut header_seen = false;
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(DataError::Io(std::io::Error::other(e.to_string())));
                }
                scan.issues.push(RowIssue {
                    line,
                    kind: IssueKind::Parse(e.to_string()),
                });
                continue;
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        if !header_seen {
            if record.iter().ne(PANEL_HEADER.iter().copied()) {
                return Err(DataError::Parse {
                    line,
                    message: format!("expected header `{}`", PANEL_HEADER.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        match parse_row(&record) {
            Ok((key, count)) => {
                if let Some(first) = seen.insert(key, line) {
                    scan.issues.push(RowIssue {
                        line,
                        kind: IssueKind::Violation(Violation::DuplicateKey(key)),
                    });
                    // first occurrence wins
                    seen.insert(key, first);
                } else {
                    scan.rows.push((line, key, count));
                }
            }
            Err(kind) => scan.issues.push(RowIssue { line, kind }),
        }
    }
    if !header_seen {
        return Err(DataError::Parse {
            line: 1,
            message: "empty input: no header".into(),
        });
    }
    Ok(scan)
}

fn parse_row(record: &csv::StringRecord) -> Result<(PanelKey, u64), IssueKind> {
    if record.len() != 4 {
        return Err(IssueKind::Parse(format!("expected 4 columns, found {}", record.len())));
    }
    let year: i32 = record[0]
        .parse()
        .map_err(|_| IssueKind::Parse(format!("year `{}` is not an integer", &record[0])))?;
    let region: Region = record[1]
        .parse()
        .map_err(|_| IssueKind::Violation(Violation::UnknownRegion(record[1].to_string())))?;
    let field: Field = record[2]
        .parse()
        .map_err(|_| IssueKind::Violation(Violation::UnknownField(record[2].to_string())))?;
    let raw = &record[3];
    let count = match raw.strip_prefix('-') {
        Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            return Err(IssueKind::Violation(Violation::NegativeCount(raw.to_string())));
        }
        _ if !raw.is_empty() && raw.bytes().all(|b| b.is_ascii_digit()) => raw
            .parse::<u64>()
            .map_err(|_| IssueKind::Parse(format!("count `{raw}` out of range")))?,
        _ => return Err(IssueKind::Parse(format!("count `{raw}` is not a base-10 integer"))),
    };
    Ok((PanelKey::new(year, region, field), count))
}

/// Loads a per-source panel, failing at the first problem.
pub fn load_panel<R: Read>(source: R) -> Result<FieldRegionPanel, DataError> {
    load_panel_with_mode(source, ConsistencyMode::PerSource)
}

pub fn load_panel_with_mode<R: Read>(source: R, mode: ConsistencyMode) -> Result<FieldRegionPanel, DataError> {
    let scan = scan_panel(source)?;
    if let Some(issue) = scan.issues.into_iter().next() {
        return Err(issue.into_error());
    }
    FieldRegionPanel::from_entries(scan.rows.into_iter().map(|(_, k, c)| (k, c)), mode)
}

impl FieldRegionPanel {
    /// Serializes to the panel CSV format, rows in key order.
    pub fn to_csv(&self) -> String {
        let mut out = PANEL_HEADER.join(",");
        out.push('\n');
        for (k, c) in self.entries() {
            out.push_str(&format!("{},{},{},{}\n", k.year, k.region, k.field, c));
        }
        out
    }
}
