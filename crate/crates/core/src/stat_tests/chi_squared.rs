use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::data::ContingencyTable;
use crate::dist::chi_squared_sf;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiSquaredOptions {
    /// Yates continuity correction; only applied to 2×2 tables.
    pub yates: bool,
}

/// Conditions under which the asymptotic p-value is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionFlags {
    pub min_expected_at_least_5: bool,
    pub total_above_40: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub expected: Vec<Vec<f64>>,
    pub assumptions: AssumptionFlags,
    pub yates_applied: bool,
}

/// Pearson's chi-squared test of independence, no continuity correction.
pub fn chi_squared_test(table: &ContingencyTable) -> Result<ChiSquaredResult, StatsError> {
    chi_squared_test_with(table, ChiSquaredOptions::default())
}

pub fn chi_squared_test_with(table: &ContingencyTable, options: ChiSquaredOptions) -> Result<ChiSquaredResult, StatsError> {
    let row_sums = table.row_sums();
    let col_sums = table.col_sums();
    if let Some(i) = row_sums.iter().position(|&s| s == 0) {
        return Err(StatsError::DegenerateTable(format!("row `{}` sums to zero", table.row_labels()[i])));
    }
    if let Some(j) = col_sums.iter().position(|&s| s == 0) {
        return Err(StatsError::DegenerateTable(format!("column `{}` sums to zero", table.col_labels()[j])));
    }
    let n = table.total() as f64;
    let yates = options.yates && table.n_rows() == 2 && table.n_cols() == 2;

    let expected: Vec<Vec<f64>> = row_sums
        .iter()
        .map(|&r| col_sums.iter().map(|&c| r as f64 * c as f64 / n).collect())
        .collect();

    let mut statistic = 0.0;
    for (obs_row, exp_row) in table.rows().iter().zip(&expected) {
        for (&o, &e) in obs_row.iter().zip(exp_row) {
            let mut dev = (o as f64 - e).abs();
            if yates {
                dev = (dev - 0.5).max(0.0);
            }
            statistic += dev * dev / e;
        }
    }
    let df = (table.n_rows() - 1) * (table.n_cols() - 1);
    let min_expected = expected.iter().flatten().copied().fold(f64::INFINITY, f64::min);

    Ok(ChiSquaredResult {
        statistic,
        df,
        p_value: chi_squared_sf(statistic, df as f64),
        expected,
        assumptions: AssumptionFlags {
            min_expected_at_least_5: min_expected >= 5.0,
            total_above_40: n > 40.0,
        },
        yates_applied: yates,
    })
}
