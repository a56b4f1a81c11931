use serde::{Deserialize, Serialize};

use super::ci::CoefficientCis;
use super::{AgreementError, Interval, Line};
use crate::data::PairedSeries;

const MAX_REWEIGHT_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// Ordinary least products (geometric-mean regression).
    #[default]
    Uniform,
    /// Proportional error: weights `1 / fitted^2`, iterated to a fixed point.
    Proportional,
    /// Caller-supplied weights.
    Given,
}

/// A least-products line with the data it was fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WlpFit {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    pub weight_scheme: WeightScheme,
    /// Normalised to mean 1.
    pub weights: Vec<f64>,
    /// Weighted means of M1 and M2.
    pub centroid: (f64, f64),
    /// Weighted Pearson correlation of M1 and M2.
    pub r: f64,
    /// Observed M2 minus fitted.
    pub residuals: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub slope_ci: Option<Interval>,
    pub intercept_ci: Option<Interval>,
    pub ci: Option<CoefficientCis>,
}

impl WlpFit {
    pub fn line(&self) -> Line {
        Line::new(self.slope, self.intercept)
    }

    pub fn fitted(&self, m1: f64) -> f64 {
        self.slope * m1 + self.intercept
    }
}

pub(crate) struct Moments {
    pub mx: f64,
    pub my: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
}

pub(crate) fn weighted_moments(x: &[f64], y: &[f64], w: &[f64]) -> Moments {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(b, w)| b * w).sum::<f64>() / sw;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for ((a, b), w) in x.iter().zip(y).zip(w) {
        let (dx, dy) = (a - mx, b - my);
        sxx += w * dx * dx;
        syy += w * dy * dy;
        sxy += w * dx * dy;
    }
    Moments { mx, my, sxx, syy, sxy }
}

/// `1 - r^2` as the share of weighted M2 variation left by the OLS line,
/// which stays exact for collinear data where `1 - r * r` would not.
pub(crate) fn one_minus_r2(fit: &WlpFit) -> f64 {
    let m = weighted_moments(&fit.m1, &fit.m2, &fit.weights);
    let beta = m.sxy / m.sxx;
    let sse: f64 = fit
        .m1
        .iter()
        .zip(&fit.m2)
        .zip(&fit.weights)
        .map(|((x, y), w)| w * ((y - m.my) - beta * (x - m.mx)).powi(2))
        .sum();
    (sse / m.syy).clamp(0.0, 1.0)
}

/// Slope and intercept only; used by refits inside the bootstrap.
pub(crate) fn line_from(x: &[f64], y: &[f64], w: &[f64]) -> Result<(Line, Moments), AgreementError> {
    let m = weighted_moments(x, y, w);
    let scale_x = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let scale_y = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let sw: f64 = w.iter().sum();
    if m.sxx <= 1e-24 * scale_x * scale_x * sw {
        return Err(AgreementError::DegenerateInput {
            operation: "fit_wlp",
            detail: "zero weighted variance in m1".into(),
        });
    }
    if m.syy <= 1e-24 * scale_y * scale_y * sw {
        return Err(AgreementError::DegenerateInput {
            operation: "fit_wlp",
            detail: "zero weighted variance in m2".into(),
        });
    }
    if m.sxy.abs() <= 1e-14 * (m.sxx * m.syy).sqrt() {
        return Err(AgreementError::UndefinedSign);
    }
    let slope = m.sxy.signum() * (m.syy / m.sxx).sqrt();
    let intercept = m.my - slope * m.mx;
    Ok((Line::new(slope, intercept), m))
}

fn check_weights(w: &[f64], n: usize) -> Result<Vec<f64>, AgreementError> {
    if w.len() != n {
        return Err(AgreementError::InvalidArgument(format!("{} weights for {n} pairs", w.len())));
    }
    if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(AgreementError::InvalidArgument("weights must be finite and positive".into()));
    }
    let mean = w.iter().sum::<f64>() / n as f64;
    Ok(w.iter().map(|v| v / mean).collect())
}

fn build(pairs: &PairedSeries, weights: Vec<f64>, scheme: WeightScheme) -> Result<WlpFit, AgreementError> {
    let (x, y) = (pairs.m1(), pairs.m2());
    let (line, m) = line_from(x, y, &weights)?;
    Ok(WlpFit {
        slope: line.slope,
        intercept: line.intercept,
        n: x.len(),
        weight_scheme: scheme,
        weights,
        centroid: (m.mx, m.my),
        r: (m.sxy / (m.sxx * m.syy).sqrt()).clamp(-1.0, 1.0),
        residuals: x.iter().zip(y).map(|(a, b)| b - line.at(*a)).collect(),
        m1: x.to_vec(),
        m2: y.to_vec(),
        slope_ci: None,
        intercept_ci: None,
        ci: None,
    })
}

/// Weighted least-products fit. `None` means uniform weights.
pub fn fit_wlp(pairs: &PairedSeries, weights: Option<&[f64]>) -> Result<WlpFit, AgreementError> {
    match weights {
        None => build(pairs, vec![1.0; pairs.len()], WeightScheme::Uniform),
        Some(w) => build(pairs, check_weights(w, pairs.len())?, WeightScheme::Given),
    }
}

/// Fit with a named scheme. `Given` is rejected here; use [`fit_wlp`].
pub fn fit_wlp_scheme(pairs: &PairedSeries, scheme: WeightScheme) -> Result<WlpFit, AgreementError> {
    match scheme {
        WeightScheme::Uniform => fit_wlp(pairs, None),
        WeightScheme::Given => Err(AgreementError::InvalidArgument("`given` weights need explicit values".into())),
        WeightScheme::Proportional => {
            let weights = proportional_weights(pairs.m1(), pairs.m2())?;
            build(pairs, weights, WeightScheme::Proportional)
        }
    }
}

pub(crate) fn proportional_weights(x: &[f64], y: &[f64]) -> Result<Vec<f64>, AgreementError> {
    let n = x.len();
    let mut w = vec![1.0; n];
    let mut previous = f64::NAN;
    for _ in 0..MAX_REWEIGHT_ITERATIONS {
        let (line, _) = line_from(x, y, &w)?;
        let fitted: Vec<f64> = x.iter().map(|v| line.at(*v)).collect();
        if let Some(f) = fitted.iter().find(|f| **f <= 0.0) {
            return Err(AgreementError::DegenerateInput {
                operation: "fit_wlp",
                detail: format!("proportional weights need positive fitted values, got {f}"),
            });
        }
        w = check_weights(&fitted.iter().map(|f| 1.0 / (f * f)).collect::<Vec<_>>(), n)?;
        if (line.slope - previous).abs() <= 1e-12 * line.slope.abs() {
            break;
        }
        previous = line.slope;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(x: &[f64], y: &[f64]) -> PairedSeries {
        PairedSeries::from_values(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn exact_line() {
        let f = fit_wlp(&pairs(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]), None).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((f.r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_four_points() {
        // S_yy / S_xx = 10 / 5, centroid (2.5, 4)
        let f = fit_wlp(&pairs(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 5.0, 6.0]), None).unwrap();
        assert!((f.slope - 2f64.sqrt()).abs() < 1e-12);
        assert!((f.intercept - (4.0 - 2.5 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(f.centroid, (2.5, 4.0));
    }

    #[test]
    fn negative_association() {
        let f = fit_wlp(&pairs(&[1.0, 2.0, 3.0, 4.0], &[6.0, 5.0, 3.0, 2.0]), None).unwrap();
        assert!((f.slope + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let err = fit_wlp(&pairs(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), None).unwrap_err();
        assert!(matches!(err, AgreementError::DegenerateInput { .. }));
        let err = fit_wlp(&pairs(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]), None).unwrap_err();
        assert!(matches!(err, AgreementError::DegenerateInput { .. }));
        // symmetric V: covariance exactly zero
        let err = fit_wlp(&pairs(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0]), None).unwrap_err();
        assert_eq!(err, AgreementError::UndefinedSign);
    }

    #[test]
    fn given_weights_are_validated_and_normalised() {
        let p = pairs(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 5.0, 6.0]);
        assert!(fit_wlp(&p, Some(&[1.0, 2.0])).is_err());
        assert!(fit_wlp(&p, Some(&[1.0, 0.0, 1.0, 1.0])).is_err());
        let f = fit_wlp(&p, Some(&[2.0, 2.0, 2.0, 2.0])).unwrap();
        assert_eq!(f.weights, vec![1.0; 4]);
        assert_eq!(f.weight_scheme, WeightScheme::Given);
        let u = fit_wlp(&p, None).unwrap();
        assert!((f.slope - u.slope).abs() < 1e-15);
    }

    #[test]
    fn heavier_weight_pulls_the_centroid() {
        let p = pairs(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 5.0, 6.0]);
        let f = fit_wlp(&p, Some(&[10.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(f.centroid.0 < 2.5);
        assert!((f.fitted(f.centroid.0) - f.centroid.1).abs() < 1e-12);
    }

    #[test]
    fn proportional_scheme_converges() {
        let x: Vec<f64> = (1..=30).map(f64::from).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| 1.1 * v + 4.2 + if i % 2 == 0 { 0.05 * v } else { -0.05 * v }).collect();
        let f = fit_wlp_scheme(&pairs(&x, &y), WeightScheme::Proportional).unwrap();
        assert_eq!(f.weight_scheme, WeightScheme::Proportional);
        // at the fixed point, weights are 1/fitted^2 up to normalisation
        let raw: Vec<f64> = x.iter().map(|v| 1.0 / f.fitted(*v).powi(2)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        for (w, r) in f.weights.iter().zip(&raw) {
            assert!((w - r / mean).abs() < 1e-8);
        }
        assert!((f.slope - 1.1).abs() < 0.05);
        assert!(fit_wlp_scheme(&pairs(&x, &y), WeightScheme::Given).is_err());
    }
}
