//! Seeded Monte-Carlo oracles. Every function is deterministic for a seed:
//! replicate `i` draws from ChaCha8 stream `i`, so results do not depend on
//! the rayon thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::agreement::{loa_band, Line, LoaModel};
use crate::data::PairedSeries;
use crate::stat_tests::{ks_normality, shapiro_wilk, NormalityMethod, ALPHA};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn standard_normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Share of `replicates` standard-normal samples of size `n` that the test
/// rejects at 0.05.
pub fn normality_rejection_rate(method: NormalityMethod, n: usize, replicates: usize, seed: u64) -> f64 {
    let rejected: usize = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let x = standard_normals(&mut stream_rng(seed, i), n);
            let r = match method {
                NormalityMethod::ShapiroWilk => shapiro_wilk(&x),
                NormalityMethod::KsLilliefors => ks_normality(&x),
            };
            usize::from(r.map(|r| r.p_value <= ALPHA).unwrap_or(false))
        })
        .sum();
    rejected as f64 / replicates as f64
}

/// `M2 = line(M1) + N(0, SD(M1)^2)` with `M1 ~ U(m1_range)`. Negative M2
/// draws are redrawn, since counts cannot be negative.
pub fn heteroscedastic_pairs(
    n: usize,
    line: Line,
    model: &LoaModel,
    m1_range: (f64, f64),
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut m1 = Vec::with_capacity(n);
    let mut m2 = Vec::with_capacity(n);
    while m1.len() < n {
        let x = rng.random_range(m1_range.0..=m1_range.1);
        let z: f64 = StandardNormal.sample(rng);
        let y = line.at(x) + model.sd(x) * z;
        if y >= 0.0 {
            m1.push(x);
            m2.push(y);
        }
    }
    (m1, m2)
}

pub fn heteroscedastic_series(n: usize, line: Line, model: &LoaModel, m1_range: (f64, f64), seed: u64) -> PairedSeries {
    let (m1, m2) = heteroscedastic_pairs(n, line, model, m1_range, &mut stream_rng(seed, 0));
    PairedSeries::from_values(m1, m2).expect("generated pairs are finite and nonnegative")
}

/// Share of points inside `[lower, upper]` of the band built from `model`
/// around `line`.
pub fn band_coverage(m1: &[f64], m2: &[f64], line: Line, model: &LoaModel) -> f64 {
    let inside = m1
        .iter()
        .zip(m2)
        .filter(|(x, y)| loa_band(model, line, **x).map(|b| b.lower <= **y && **y <= b.upper).unwrap_or(false))
        .count();
    inside as f64 / m1.len() as f64
}
