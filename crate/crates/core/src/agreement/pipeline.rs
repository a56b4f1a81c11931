use serde::{Deserialize, Serialize};

use super::ci::{analytic_ci, bootstrap_ci, CoefficientCis};
use super::influence::{classify_influence, InfluenceClass, InfluenceKind};
use super::loa::{fit_loa, Eqn5Convention, LoaModel, LoaOptions};
use super::threshold::{interchange_threshold, Crossing, EdgeSet};
use super::wlp::{fit_wlp_scheme, WeightScheme, WlpFit};
use super::AgreementError;
use crate::data::PairedSeries;
use crate::stat_tests::{ks_normality, NormalityResult};

const MIN_PAIRS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementOptions {
    pub weights: WeightScheme,
    pub ci_level: f64,
    /// `Some((seed, n_resamples))` adds a bootstrap interval next to the
    /// analytic one.
    pub bootstrap: Option<(u64, usize)>,
    pub loa: LoaOptions,
    /// Defaults to `[0, max M1]`.
    pub threshold_range: Option<(f64, f64)>,
}

impl Default for AgreementOptions {
    fn default() -> Self {
        Self {
            weights: WeightScheme::Uniform,
            ci_level: 0.95,
            bootstrap: None,
            loa: LoaOptions::default(),
            threshold_range: None,
        }
    }
}

/// Crossings for one edge set under one error-term convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub eqn5: Eqn5Convention,
    pub edges: EdgeSet,
    pub range: (f64, f64),
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointInfluence {
    pub label: String,
    pub m1: f64,
    pub m2: f64,
    pub class: InfluenceClass,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub cross_field_positive: usize,
    pub growth_dominant: usize,
    pub cross_field_dominant: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.cross_field_positive + self.growth_dominant + self.cross_field_dominant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub options: AgreementOptions,
    /// Carries the analytic intervals.
    pub fit: WlpFit,
    pub bootstrap_ci: Option<CoefficientCis>,
    pub residual_normality: NormalityResult,
    /// Set when residual normality is rejected at 0.05.
    pub residuals_non_normal: bool,
    pub loa: LoaModel,
    /// Limits once, then inner and outer bounds under every convention.
    pub thresholds: Vec<ThresholdReport>,
    pub influence: Vec<PointInfluence>,
    pub class_counts: ClassCounts,
}

impl AgreementResult {
    pub fn thresholds_for(&self, eqn5: Eqn5Convention, edges: EdgeSet) -> Option<&ThresholdReport> {
        self.thresholds
            .iter()
            .find(|t| t.edges == edges && (edges == EdgeSet::Limits || t.eqn5 == eqn5))
    }
}

/// Fit, interval, band, thresholds and per-point classes in one pass.
pub fn agreement_pipeline(pairs: &PairedSeries, options: &AgreementOptions) -> Result<AgreementResult, AgreementError> {
    if pairs.len() < MIN_PAIRS {
        return Err(AgreementError::TooFewPoints {
            operation: "agreement_pipeline",
            n: pairs.len(),
            min: MIN_PAIRS,
        });
    }
    let mut fit = fit_wlp_scheme(pairs, options.weights)?;
    let analytic = analytic_ci(&fit, options.ci_level)?;
    fit.slope_ci = Some(analytic.slope);
    fit.intercept_ci = Some(analytic.intercept);
    fit.ci = Some(analytic);
    let bootstrap_ci = match options.bootstrap {
        Some((seed, n)) => Some(bootstrap_ci(&fit, options.ci_level, seed, n)?),
        None => None,
    };

    // The band needs non-degenerate residuals; checking it first gives that
    // failure a precise name instead of a zero-variance normality error.
    let loa = fit_loa(&fit, options.loa)?;
    let residual_normality = ks_normality(&fit.residuals)?;

    let max_m1 = pairs.m1().iter().fold(0.0f64, |a, v| a.max(*v));
    let range = options.threshold_range.unwrap_or((0.0, max_m1));
    let line = fit.line();
    let mut thresholds = vec![ThresholdReport {
        eqn5: options.loa.eqn5,
        edges: EdgeSet::Limits,
        range,
        crossings: interchange_threshold(&loa, line, range, EdgeSet::Limits)?,
    }];
    for eqn5 in Eqn5Convention::ALL {
        let model = loa.with_eqn5(eqn5);
        for edges in [EdgeSet::Inner, EdgeSet::Outer] {
            thresholds.push(ThresholdReport {
                eqn5,
                edges,
                range,
                crossings: interchange_threshold(&model, line, range, edges)?,
            });
        }
    }

    let mut class_counts = ClassCounts::default();
    let influence = pairs
        .labels()
        .iter()
        .zip(pairs.m1().iter().zip(pairs.m2()))
        .map(|(label, (&m1, &m2))| {
            let class = classify_influence(line, (m1, m2));
            match class.kind {
                InfluenceKind::CrossFieldPositive => class_counts.cross_field_positive += 1,
                InfluenceKind::GrowthDominant => class_counts.growth_dominant += 1,
                InfluenceKind::CrossFieldDominant => class_counts.cross_field_dominant += 1,
            }
            PointInfluence {
                label: label.clone(),
                m1,
                m2,
                class,
            }
        })
        .collect();

    Ok(AgreementResult {
        options: *options,
        residuals_non_normal: !residual_normality.normal_at_005,
        fit,
        bootstrap_ci,
        residual_normality,
        loa,
        thresholds,
        influence,
        class_counts,
    })
}
