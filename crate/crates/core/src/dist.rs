//! Thin wrappers over the reference distributions used by the test battery.
//!
//! Everything here delegates to `statrs`; the wrappers fix the parameterisation
//! (standard normal, central t, central F) and clamp tail probabilities into
//! `[0, 1]` so callers never see rounding excursions.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal, StudentsT};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    clamp_prob(0.5 * erfc(-z / std::f64::consts::SQRT_2))
}

/// Standard normal upper tail, `P(Z > z)`, computed without cancellation.
pub fn normal_sf(z: f64) -> f64 {
    clamp_prob(0.5 * erfc(z / std::f64::consts::SQRT_2))
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Upper tail of the chi-squared distribution with `df` degrees of freedom,
/// via the regularized upper incomplete gamma function `Q(df/2, x/2)`.
pub fn chi_squared_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    clamp_prob(gamma_ur(df / 2.0, x / 2.0))
}

/// Two-sided tail probability of a central t statistic.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    clamp_prob(2.0 * dist.sf(t.abs()))
}

/// Quantile of the central t distribution.
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df > 0").inverse_cdf(p)
}

/// Quantile of the central F distribution.
pub fn f_quantile(p: f64, df1: f64, df2: f64) -> f64 {
    FisherSnedecor::new(df1, df2)
        .expect("df > 0")
        .inverse_cdf(p)
}
