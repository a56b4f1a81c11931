//! Hypothesis-test battery.
//!
//! All p-values are two-sided unless the test is inherently one-tailed
//! (chi-squared, the normality tests).

mod chi_squared;
mod normality;
mod ranks;
mod shapiro_wilk;
mod spearman;
mod wilcoxon;

pub use chi_squared::{chi_squared_test, chi_squared_test_with, AssumptionFlags, ChiSquaredOptions, ChiSquaredResult};
pub use normality::{kolmogorov_sf, ks_fixed_normal, ks_normality, ks_statistic, lilliefors_p_value, KsFixedResult};
pub use ranks::{mid_ranks, tie_groups};
pub use shapiro_wilk::{shapiro_wilk, shapiro_wilk_coefficients};
pub use spearman::{spearman, spearman_exact_p, spearman_matrix, spearman_matrix_with, SpearmanMatrix, SpearmanPMethod};
pub use wilcoxon::{
    wilcoxon_signed_rank, wilcoxon_signed_rank_with, wilcoxon_differences, WilcoxonMethod, WilcoxonOptions,
    WilcoxonResult, ZeroHandling,
};

use serde::{Deserialize, Serialize};

/// Significance level used for every boolean decision flag.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("degenerate table: {0}")]
    DegenerateTable(String),
    #[error("{test}: sample size {n} outside [{min}, {max}]")]
    BadSampleSize {
        test: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },
    #[error("zero variance in sample")]
    ZeroVariance,
    #[error("sample contains non-finite values")]
    NonFinite,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("too few non-zero pairs: {n_effective} (need at least {min})")]
    TooFewPairs { n_effective: usize, min: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalityMethod {
    ShapiroWilk,
    KsLilliefors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub method: NormalityMethod,
    /// W for Shapiro–Wilk, D for Lilliefors.
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub normal_at_005: bool,
}

impl NormalityResult {
    fn new(method: NormalityMethod, statistic: f64, p_value: f64, n: usize) -> Self {
        Self {
            method,
            statistic,
            p_value,
            n,
            normal_at_005: p_value > ALPHA,
        }
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}
