// Shapiro–Wilk W with Royston's coefficient and p-value approximations
// (Applied Statistics algorithm AS R94), restricted to 3 <= n <= 50.

use super::{check_finite, sorted_copy, NormalityMethod, NormalityResult, StatsError};
use crate::dist::{normal_quantile, normal_sf};

const MIN_N: usize = 3;
const MAX_N: usize = 50;

// Polynomial coefficients, constant term first.
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(cc: &[f64], x: f64) -> f64 {
    cc.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// The `n / 2` positive coefficients for the largest order statistics,
/// largest first. The lower half is their negation.
pub fn shapiro_wilk_coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an = n as f64;
    // m_i for the smallest order statistics (negative values)
    let mut m: Vec<f64> = (1..=half).map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        m[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    m[0] = a1;
    for v in &mut m[first_scaled..] {
        *v /= -fac;
    }
    m
}

/// Shapiro–Wilk normality test for `3 <= n <= 50`.
pub fn shapiro_wilk(sample: &[f64]) -> Result<NormalityResult, StatsError> {
    let n = sample.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(StatsError::BadSampleSize {
            test: "shapiro-wilk",
            n,
            min: MIN_N,
            max: MAX_N,
        });
    }
    check_finite(sample)?;
    let x = sorted_copy(sample);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let a = shapiro_wilk_coefficients(n);

    // Signed coefficient of the i-th order statistic (0-based).
    let coef = |i: usize| -> f64 {
        let j = n - 1 - i;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => -a[i],
            std::cmp::Ordering::Greater => a[j],
            std::cmp::Ordering::Equal => 0.0,
        }
    };

    // W as the squared correlation between data and coefficients; scaling by
    // the range keeps the sums well conditioned.
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_a = (0..n).map(coef).sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in xs.iter().enumerate() {
        let da = coef(i) - mean_a;
        let dx = xi - mean_x;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = ((ssassx - sax) * (ssassx + sax) / (ssa * ssx)).max(0.0);
    let w = (1.0 - w1).clamp(f64::MIN_POSITIVE, 1.0);

    Ok(NormalityResult::new(NormalityMethod::ShapiroWilk, w, p_value(w, w1, n), n))
}

fn p_value(w: f64, w1: f64, n: usize) -> f64 {
    if n == 3 {
        // exact for n = 3
        const SIX_OVER_PI: f64 = 6.0 / std::f64::consts::PI;
        let p = SIX_OVER_PI * (w.sqrt().asin() - std::f64::consts::FRAC_PI_3);
        return p.clamp(0.0, 1.0);
    }
    if w1 <= 0.0 {
        return 1.0;
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    normal_sf((y - m) / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_points_equally_spaced() {
        let r = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-9);
        assert!(r.normal_at_005);
    }

    #[test]
    fn closed_form_for_three() {
        // n = 3: W = (a1 (x3 - x1))^2 / SS with a1 = 1/sqrt(2)
        let x = [0.0, 1.0, 5.0];
        let mean = 2.0;
        let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
        let expected = 0.5 * 25.0 / ss;
        let r = shapiro_wilk(&x).unwrap();
        assert!((r.statistic - expected).abs() < 1e-12);
    }

    #[test]
    fn reference_values_match_scipy() {
        // scipy.stats.shapiro (same AS R94 routine)
        let cases: [(&[f64], f64, f64); 5] = [
            (&[1.0, 2.0, 3.0, 4.0, 5.0], 0.986762155211559, 0.9671739349728582),
            (&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0], 0.9701646110856056, 0.8923673061902978),
            (
                &[148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0, 236.0],
                0.7888146948631716,
                0.006703814061898823,
            ),
            (&[0.0, 1.0, 5.0], 0.8928571428571429, 0.36311315497103014),
            (
                &[
                    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0,
                    18.0, 19.0, 20.0,
                ],
                0.9603751832429884,
                0.5513717457916771,
            ),
        ];
        for (x, w, p) in cases {
            let r = shapiro_wilk(x).unwrap();
            assert!((r.statistic - w).abs() < 1e-6, "n={}: W={}", x.len(), r.statistic);
            assert!((r.p_value - p).abs() < 1e-5, "n={}: p={}", x.len(), r.p_value);
        }
    }

    #[test]
    fn sample_size_limits() {
        assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(StatsError::BadSampleSize { .. })));
        let big: Vec<f64> = (0..51).map(f64::from).collect();
        assert!(matches!(shapiro_wilk(&big), Err(StatsError::BadSampleSize { .. })));
        assert_eq!(shapiro_wilk(&[4.0; 10]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn coefficients_are_unit_norm() {
        for n in [4usize, 5, 6, 11, 21, 50] {
            let a = shapiro_wilk_coefficients(n);
            let norm: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-9, "n={n}: {norm}");
            assert!(a.windows(2).all(|w| w[0] > w[1]));
        }
    }

    proptest! {
        #[test]
        fn location_scale_invariant(xs in prop::collection::vec(-1e3f64..1e3, 3..=50), scale in 0.01f64..100.0, shift in -1e4f64..1e4) {
            prop_assume!(xs.iter().any(|&v| (v - xs[0]).abs() > 1e-6));
            let a = shapiro_wilk(&xs).unwrap();
            let moved: Vec<f64> = xs.iter().map(|v| scale * v + shift).collect();
            let b = shapiro_wilk(&moved).unwrap();
            prop_assert!(a.statistic > 0.0 && a.statistic <= 1.0);
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
        }
    }
}
