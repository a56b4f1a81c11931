//! Kolmogorov–Smirnov statistics and the Lilliefors normality test.

use serde::{Deserialize, Serialize};

use super::{check_finite, sorted_copy, NormalityMethod, NormalityResult, StatsError};
use crate::dist::normal_cdf;

/// `D = sup |F_n(x) - F(x)|` for an ascending sample.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the limiting Kolmogorov distribution,
/// `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Jacobi-theta form converges fast for small lambda.
        let c = -std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=50).step_by(2).map(|k| (c * (k * k) as f64).exp()).sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsFixedResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test against a fully specified standard normal.
///
/// The p-value uses the asymptotic Kolmogorov distribution with Stephens'
/// finite-sample adjustment. Not valid when the mean or SD were estimated
/// from the same sample; use [`ks_normality`] for that.
pub fn ks_fixed_normal(sample: &[f64]) -> Result<KsFixedResult, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::BadSampleSize {
            test: "ks",
            n: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    check_finite(sample)?;
    let d = ks_statistic(&sorted_copy(sample), normal_cdf);
    let rn = (sample.len() as f64).sqrt();
    Ok(KsFixedResult {
        statistic: d,
        p_value: kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d),
        n: sample.len(),
    })
}

/// Dallal–Wilkinson analytic approximation to the Lilliefors p-value, with
/// Stephens' modified-statistic polynomials above 0.1 (as in R's
/// `nortest::lillie.test`).
pub fn lilliefors_p_value(d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let (kd, nd) = if n <= 100 { (d, nf) } else { (d * (nf / 100.0).powf(0.49), 100.0) };
    let mut p = (-7.01256 * kd * kd * (nd + 2.78019) + 2.99587 * kd * (nd + 2.78019).sqrt() - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p > 0.1 {
        let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * d;
        p = if kk <= 0.302 {
            1.0
        } else if kk <= 0.5 {
            2.76773 - 19.828315 * kk + 80.709644 * kk.powi(2) - 138.55152 * kk.powi(3) + 81.218052 * kk.powi(4)
        } else if kk <= 0.9 {
            -4.901232 + 40.662806 * kk - 97.490286 * kk.powi(2) + 94.029866 * kk.powi(3) - 32.355711 * kk.powi(4)
        } else if kk <= 1.31 {
            6.198765 - 19.558097 * kk + 23.186922 * kk.powi(2) - 12.234627 * kk.powi(3) + 2.423045 * kk.powi(4)
        } else {
            0.0
        };
    }
    p.clamp(0.0, 1.0)
}

/// Lilliefors test: KS distance to the normal with the sample's own mean
/// and SD, judged against the null distribution for estimated parameters.
pub fn ks_normality(sample: &[f64]) -> Result<NormalityResult, StatsError> {
    let n = sample.len();
    if n < 4 {
        return Err(StatsError::BadSampleSize {
            test: "ks-lilliefors",
            n,
            min: 4,
            max: usize::MAX,
        });
    }
    check_finite(sample)?;
    let mean = sample.iter().sum::<f64>() / n as f64;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if sd <= 0.0 || sd <= 1e-14 * mean.abs() {
        return Err(StatsError::ZeroVariance);
    }
    let sorted = sorted_copy(sample);
    let d = ks_statistic(&sorted, |x| normal_cdf((x - mean) / sd));
    Ok(NormalityResult::new(NormalityMethod::KsLilliefors, d, lilliefors_p_value(d, n), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_point_against_standard_normal() {
        let r = ks_fixed_normal(&[0.0]).unwrap();
        assert_eq!(r.statistic, 0.5);
    }

    #[test]
    fn kolmogorov_reference_points() {
        // scipy.stats.kstwobign.sf
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(0.5) - 0.963945243).abs() < 1e-6);
        assert!((kolmogorov_sf(2.0) - 0.000670925).abs() < 1e-8);
        // both branches agree at the switch point
        let left = kolmogorov_sf(1.0 - 1e-12);
        let right = kolmogorov_sf(1.0);
        assert!((left - right).abs() < 1e-10);
    }

    #[test]
    fn lilliefors_reference_values() {
        // below 0.1: statsmodels lilliefors(pvalmethod="approx")
        let x = [148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0, 236.0];
        let r = ks_normality(&x).unwrap();
        assert!((r.statistic - 0.25921535714887756).abs() < 1e-12);
        assert!((r.p_value - 0.03740762180003083).abs() < 1e-9, "{}", r.p_value);

        // above 0.1 statsmodels switches to table interpolation (0.5886);
        // this is the Stephens polynomial evaluated independently
        let y: Vec<f64> = (1..=30).map(|i| (i as f64).powf(1.5)).collect();
        let r = ks_normality(&y).unwrap();
        assert!((r.statistic - 0.10140328512205521).abs() < 1e-12);
        assert!((r.p_value - 0.5998107685151619).abs() < 1e-9, "{}", r.p_value);
    }

    #[test]
    fn too_small_or_constant() {
        assert!(matches!(ks_normality(&[1.0, 2.0, 3.0]), Err(StatsError::BadSampleSize { .. })));
        assert_eq!(ks_normality(&[2.0; 8]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn clearly_non_normal_is_rejected() {
        let x: Vec<f64> = (0..84).map(|i| if i < 70 { 0.0 } else { 10.0 + i as f64 }).collect();
        let r = ks_normality(&x).unwrap();
        assert!(!r.normal_at_005);
        assert!(r.p_value < 0.001);
    }

    proptest! {
        #[test]
        fn affine_invariant(xs in prop::collection::vec(-100.0f64..100.0, 4..120), scale in 0.01f64..50.0, shift in -1e3f64..1e3) {
            prop_assume!(xs.iter().any(|&v| (v - xs[0]).abs() > 1e-3));
            let a = ks_normality(&xs).unwrap();
            let moved: Vec<f64> = xs.iter().map(|v| v * scale + shift).collect();
            let b = ks_normality(&moved).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&a.statistic));
        }

        #[test]
        fn statistic_at_least_half_over_n(xs in prop::collection::vec(-5.0f64..5.0, 1..100)) {
            let r = ks_fixed_normal(&xs).unwrap();
            prop_assert!(r.statistic >= 1.0 / (2.0 * xs.len() as f64) - 1e-15);
        }
    }
}
