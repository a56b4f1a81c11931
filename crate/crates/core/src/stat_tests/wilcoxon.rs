use serde::{Deserialize, Serialize};

use super::ranks::mid_ranks;
use super::{check_finite, StatsError, ALPHA};
use crate::data::PairedSeries;
use crate::dist::normal_sf;

const MIN_EFFECTIVE: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroHandling {
    /// Drop zero differences before ranking.
    #[default]
    Wilcoxon,
    /// Rank zeros with the rest, then drop their ranks from both sums.
    Pratt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilcoxonOptions {
    pub zero_handling: ZeroHandling,
    /// Largest `n_effective` that uses the exact null distribution.
    pub exact_max_n: usize,
    pub continuity_correction: bool,
}

impl Default for WilcoxonOptions {
    fn default() -> Self {
        Self {
            zero_handling: ZeroHandling::Wilcoxon,
            exact_max_n: 25,
            continuity_correction: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub w_plus: f64,
    pub w_minus: f64,
    pub n_effective: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
    pub zero_handling: ZeroHandling,
    pub significant_at_005: bool,
}

/// Paired signed-rank test on `m2 - m1`.
pub fn wilcoxon_signed_rank(pairs: &PairedSeries) -> Result<WilcoxonResult, StatsError> {
    wilcoxon_differences(&pairs.differences(), WilcoxonOptions::default())
}

pub fn wilcoxon_signed_rank_with(pairs: &PairedSeries, options: WilcoxonOptions) -> Result<WilcoxonResult, StatsError> {
    wilcoxon_differences(&pairs.differences(), options)
}

/// Signed-rank test on raw differences.
pub fn wilcoxon_differences(d: &[f64], options: WilcoxonOptions) -> Result<WilcoxonResult, StatsError> {
    check_finite(d)?;
    let (signs, ranks): (Vec<f64>, Vec<f64>) = match options.zero_handling {
        ZeroHandling::Wilcoxon => {
            let nz: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
            let abs: Vec<f64> = nz.iter().map(|v| v.abs()).collect();
            (nz, mid_ranks(&abs))
        }
        ZeroHandling::Pratt => {
            let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
            let r = mid_ranks(&abs);
            d.iter().zip(r).filter(|(v, _)| **v != 0.0).map(|(v, r)| (*v, r)).unzip()
        }
    };
    let n = signs.len();
    if n < MIN_EFFECTIVE {
        return Err(StatsError::TooFewPairs {
            n_effective: n,
            min: MIN_EFFECTIVE,
        });
    }
    let w_plus: f64 = signs.iter().zip(&ranks).filter(|(s, _)| **s > 0.0).map(|(_, r)| r).sum();
    let w_minus: f64 = ranks.iter().sum::<f64>() - w_plus;

    let (p_value, method) = if n <= options.exact_max_n {
        (exact_p(&ranks, w_plus), WilcoxonMethod::Exact)
    } else {
        (normal_p(&ranks, w_plus, options.continuity_correction), WilcoxonMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        w_plus,
        w_minus,
        n_effective: n,
        p_value,
        method,
        zero_handling: options.zero_handling,
        significant_at_005: p_value < ALPHA,
    })
}

/// Null distribution of `W+` over all `2^n` equally likely sign patterns,
/// counted by subset-sum on doubled ranks (mid-ranks are multiples of 1/2).
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let total = 2f64.powi(ranks.len() as i32);
    let t = (2.0 * w_plus).round() as usize;
    let lower: f64 = counts[..=t].iter().sum();
    let upper: f64 = counts[t..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Normal approximation. Using the conditional moments given the ranks
/// (`sum r / 2`, `sum r^2 / 4`) builds in the tie correction.
fn normal_p(ranks: &[f64], w_plus: f64, continuity: bool) -> f64 {
    let mean = ranks.iter().sum::<f64>() / 2.0;
    let sd = (ranks.iter().map(|r| r * r).sum::<f64>() / 4.0).sqrt();
    let mut dev = w_plus - mean;
    if continuity {
        dev = (dev.abs() - 0.5).max(0.0);
    }
    (2.0 * normal_sf(dev.abs() / sd)).min(1.0)
}
