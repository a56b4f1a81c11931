use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::wlp::{line_from, one_minus_r2, proportional_weights, WeightScheme, WlpFit};
use super::{AgreementError, Interval};
use crate::dist::f_quantile;

pub const MIN_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    /// Geometric-mean-regression formula.
    #[default]
    Analytic,
    /// Percentile interval over case-resampled refits.
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiOptions {
    pub level: f64,
    pub method: CiMethod,
    pub seed: u64,
    pub n_resamples: usize,
}

impl Default for CiOptions {
    fn default() -> Self {
        Self {
            level: 0.95,
            method: CiMethod::Analytic,
            seed: 0,
            n_resamples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCis {
    pub method: CiMethod,
    pub level: f64,
    pub slope: Interval,
    pub intercept: Interval,
    /// Bootstrap only.
    pub seed: Option<u64>,
    pub n_resamples: Option<usize>,
    /// Resamples whose refit was degenerate and were left out.
    pub failed_resamples: usize,
}

fn check_level(level: f64) -> Result<(), AgreementError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(AgreementError::InvalidArgument(format!("confidence level {level} outside (0, 1)")))
    }
}

/// `slope * (sqrt(B + 1) +- sqrt(B))` with
/// `B = F(level; 1, n - 2) * (1 - r^2) / (n - 2)`; intercept limits are the
/// lines through the centroid at the slope limits.
pub fn analytic_ci(fit: &WlpFit, level: f64) -> Result<CoefficientCis, AgreementError> {
    check_level(level)?;
    if fit.n < 3 {
        return Err(AgreementError::TooFewPoints {
            operation: "wlp_confidence_intervals",
            n: fit.n,
            min: 3,
        });
    }
    let df = (fit.n - 2) as f64;
    let b = f_quantile(level, 1.0, df) * one_minus_r2(fit) / df;
    let (lo, hi) = ((b + 1.0).sqrt() - b.sqrt(), (b + 1.0).sqrt() + b.sqrt());
    let slope = Interval::new(fit.slope * lo, fit.slope * hi);
    let (cx, cy) = fit.centroid;
    let intercept = Interval::new(cy - slope.lower * cx, cy - slope.upper * cx);
    Ok(CoefficientCis {
        method: CiMethod::Analytic,
        level,
        slope,
        intercept,
        seed: None,
        n_resamples: None,
        failed_resamples: 0,
    })
}

/// Linear-interpolation quantile of an ascending slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Percentile bootstrap. Resample `i` draws from its own ChaCha8 stream
/// (`seed`, stream `i`), so the result does not depend on thread count.
pub fn bootstrap_ci(fit: &WlpFit, level: f64, seed: u64, n_resamples: usize) -> Result<CoefficientCis, AgreementError> {
    check_level(level)?;
    if n_resamples < MIN_RESAMPLES {
        return Err(AgreementError::InvalidArgument(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples, got {n_resamples}"
        )));
    }
    if fit.n < 3 {
        return Err(AgreementError::TooFewPoints {
            operation: "wlp_confidence_intervals",
            n: fit.n,
            min: 3,
        });
    }
    let n = fit.n;
    let refits: Vec<Option<(f64, f64)>> = (0..n_resamples as u64)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let x: Vec<f64> = idx.iter().map(|&i| fit.m1[i]).collect();
            let y: Vec<f64> = idx.iter().map(|&i| fit.m2[i]).collect();
            let w = match fit.weight_scheme {
                WeightScheme::Uniform => vec![1.0; n],
                WeightScheme::Given => idx.iter().map(|&i| fit.weights[i]).collect(),
                WeightScheme::Proportional => proportional_weights(&x, &y).ok()?,
            };
            line_from(&x, &y, &w).ok().map(|(l, _)| (l.slope, l.intercept))
        })
        .collect();

    let (mut slopes, mut intercepts): (Vec<f64>, Vec<f64>) = refits.iter().flatten().copied().unzip();
    let failed = n_resamples - slopes.len();
    if slopes.len() < n_resamples / 2 {
        return Err(AgreementError::DegenerateInput {
            operation: "wlp_confidence_intervals",
            detail: format!("{failed} of {n_resamples} bootstrap refits were degenerate"),
        });
    }
    slopes.sort_by(f64::total_cmp);
    intercepts.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(CoefficientCis {
        method: CiMethod::Bootstrap,
        level,
        slope: Interval::new(quantile(&slopes, tail), quantile(&slopes, 1.0 - tail)),
        intercept: Interval::new(quantile(&intercepts, tail), quantile(&intercepts, 1.0 - tail)),
        seed: Some(seed),
        n_resamples: Some(n_resamples),
        failed_resamples: failed,
    })
}

/// Returns `fit` with `slope_ci`, `intercept_ci` and `ci` filled in.
pub fn wlp_confidence_intervals(fit: &WlpFit, options: &CiOptions) -> Result<WlpFit, AgreementError> {
    let cis = match options.method {
        CiMethod::Analytic => analytic_ci(fit, options.level)?,
        CiMethod::Bootstrap => bootstrap_ci(fit, options.level, options.seed, options.n_resamples)?,
    };
    let mut out = fit.clone();
    out.slope_ci = Some(cis.slope);
    out.intercept_ci = Some(cis.intercept);
    out.ci = Some(cis);
    Ok(out)
}
