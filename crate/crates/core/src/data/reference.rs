//! The published aggregate dataset, compiled into the library.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{growth_summary, load_panel, shares, ContingencyTable, FieldRegionPanel, GrowthSummary, Region, ShareBreakdown};

pub const PAPER_PANEL_CSV: &str = include_str!("../../data/paper_panel.csv");
pub const PAPER_TABLES_CSV: &str = include_str!("../../data/paper_tables.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTable {
    pub id: String,
    pub table: ContingencyTable,
}

/// Published world totals around the 2018 methodology change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTotals {
    pub y2017: u64,
    pub y2018_esi: u64,
    pub y2018_cross_field: u64,
    pub y2018_all: u64,
}

#[derive(Debug, Clone)]
pub struct PaperReference {
    pub panel: FieldRegionPanel,
    pub tables: Vec<LabeledTable>,
}

impl PaperReference {
    pub fn table(&self, id: &str) -> Option<&ContingencyTable> {
        self.tables.iter().find(|t| t.id == id).map(|t| &t.table)
    }

    pub fn totals(&self) -> ReferenceTotals {
        let world = |year, cf| self.panel.region_total(year, Region::World, cf).expect("bundled world total");
        let all = world(2018, true);
        let esi = world(2018, false);
        ReferenceTotals {
            y2017: world(2017, true),
            y2018_esi: esi,
            y2018_cross_field: all - esi,
            y2018_all: all,
        }
    }

    pub fn growth(&self) -> GrowthSummary {
        growth_summary(&self.panel).expect("bundled panel has several years")
    }

    /// Regional shares for 2017, and for 2018 without and with cross-field.
    pub fn regional_shares(&self) -> Vec<ShareBreakdown> {
        [(2017, false), (2018, false), (2018, true)]
            .into_iter()
            .map(|(y, cf)| shares(&self.panel, y, cf).expect("bundled shares"))
            .collect()
    }

    /// Contingency-table sidecar serialized back to CSV.
    pub fn tables_csv() -> &'static str {
        PAPER_TABLES_CSV
    }
}

/// Returns the bundled published dataset: contingency tables exactly as
/// printed, plus the aggregate panel behind the totals and shares.
pub fn paper_reference_data() -> PaperReference {
    let panel = load_panel(PAPER_PANEL_CSV.as_bytes()).expect("bundled panel is valid");
    let tables = parse_tables(PAPER_TABLES_CSV).expect("bundled tables are valid");
    PaperReference { panel, tables }
}

/// Rows in order, columns in order, cells.
type TableParts = (Vec<String>, Vec<String>, BTreeMap<(usize, usize), u64>);

/// Parses the `table,row,column,count` sidecar. Row and column order follow
/// first appearance.
pub fn parse_tables(src: &str) -> Result<Vec<LabeledTable>, super::DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(src.as_bytes());
    let mut order: Vec<String> = Vec::new();
    let mut acc: BTreeMap<String, TableParts> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| super::DataError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let count: u64 = rec[3].parse().map_err(|_| super::DataError::Parse {
            line,
            message: format!("bad count `{}`", &rec[3]),
        })?;
        let id = rec[0].to_string();
        if !acc.contains_key(&id) {
            order.push(id.clone());
        }
        let (rows, cols, cells) = acc.entry(id).or_default();
        let ri = index_of(rows, &rec[1]);
        let ci = index_of(cols, &rec[2]);
        cells.insert((ri, ci), count);
    }
    order
        .into_iter()
        .map(|id| {
            let (rows, cols, cells) = acc.remove(&id).expect("id recorded");
            let grid = (0..rows.len())
                .map(|i| {
                    (0..cols.len())
                        .map(|j| {
                            cells.get(&(i, j)).copied().ok_or_else(|| {
                                super::DataError::MissingData(format!("{id}: cell ({}, {}) missing", rows[i], cols[j]))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabeledTable {
                id,
                table: ContingencyTable::new(grid, rows, cols)?,
            })
        })
        .collect()
}

fn index_of(list: &mut Vec<String>, label: &str) -> usize {
    match list.iter().position(|l| l == label) {
        Some(i) => i,
        None => {
            list.push(label.to_string());
            list.len() - 1
        }
    }
}
