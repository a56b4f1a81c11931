use serde::{Deserialize, Serialize};

use super::ranks::mid_ranks;
use super::{check_finite, StatsError, ALPHA};
use crate::dist::student_t_two_sided;

const MIN_N: usize = 4;
const EXACT_MAX_N: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpearmanPMethod {
    /// `t = rho * sqrt((n - 2) / (1 - rho^2))` on `n - 2` df.
    #[default]
    TApprox,
    /// Full permutation distribution; only for `n <= 10`.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpearmanMatrix {
    pub labels: Vec<String>,
    pub n: usize,
    pub p_method: SpearmanPMethod,
    pub rho: Vec<Vec<f64>>,
    pub p_values: Vec<Vec<f64>>,
    /// `p < 0.05`.
    pub significant: Vec<Vec<bool>>,
}

impl SpearmanMatrix {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rho_between(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.rho[self.index_of(a)?][self.index_of(b)?])
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(format!("{} vs {}", x.len(), y.len())));
    }
    if x.len() < MIN_N {
        return Err(StatsError::BadSampleSize {
            test: "spearman",
            n: x.len(),
            min: MIN_N,
            max: usize::MAX,
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    if is_constant(x) || is_constant(y) {
        return Err(StatsError::ZeroVariance);
    }
    Ok(())
}

fn t_approx_p(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return 0.0;
    }
    student_t_two_sided(rho * (df / denom).sqrt(), df)
}

/// Spearman's rho with its t-approximation p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    check_pair(x, y)?;
    let rho = pearson(&mid_ranks(x), &mid_ranks(y));
    Ok((rho, t_approx_p(rho, x.len())))
}

/// Two-sided permutation p-value: the share of all `n!` rearrangements of
/// `y` whose |rho| is at least the observed one.
pub fn spearman_exact_p(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    let n = x.len();
    if n > EXACT_MAX_N {
        return Err(StatsError::BadSampleSize {
            test: "spearman-exact",
            n,
            min: MIN_N,
            max: EXACT_MAX_N,
        });
    }
    let rx = mid_ranks(x);
    let mut ry = mid_ranks(y);
    let observed = pearson(&rx, &ry).abs() - 1e-12;

    // Heap's algorithm over ry.
    let mut c = vec![0usize; n];
    let mut hits = u64::from(pearson(&rx, &ry).abs() >= observed);
    let mut total = 1u64;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            total += 1;
            if pearson(&rx, &ry).abs() >= observed {
                hits += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

pub fn spearman_matrix(series: &[Vec<f64>], labels: &[String]) -> Result<SpearmanMatrix, StatsError> {
    spearman_matrix_with(series, labels, SpearmanPMethod::TApprox)
}

pub fn spearman_matrix_with(
    series: &[Vec<f64>],
    labels: &[String],
    p_method: SpearmanPMethod,
) -> Result<SpearmanMatrix, StatsError> {
    let k = series.len();
    if k < 2 {
        return Err(StatsError::InvalidArgument(format!("need at least 2 series, got {k}")));
    }
    if labels.len() != k {
        return Err(StatsError::LengthMismatch(format!("{} labels for {k} series", labels.len())));
    }
    let n = series[0].len();
    if let Some(s) = series.iter().find(|s| s.len() != n) {
        return Err(StatsError::LengthMismatch(format!("series of length {} and {n}", s.len())));
    }
    let mut rho = vec![vec![1.0; k]; k];
    let mut p_values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let (r, p_t) = spearman(&series[i], &series[j])?;
            let p = match p_method {
                SpearmanPMethod::TApprox => p_t,
                SpearmanPMethod::Exact => spearman_exact_p(&series[i], &series[j])?,
            };
            rho[i][j] = r;
            rho[j][i] = r;
            p_values[i][j] = p;
            p_values[j][i] = p;
        }
    }
    let significant = p_values.iter().map(|row| row.iter().map(|&p| p < ALPHA).collect()).collect();
    Ok(SpearmanMatrix {
        labels: labels.to_vec(),
        n,
        p_method,
        rho,
        p_values,
        significant,
    })
}
