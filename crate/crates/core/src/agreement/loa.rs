use serde::{Deserialize, Serialize};

use super::wlp::WlpFit;
use super::{AgreementError, Line};
use crate::dist::student_t_quantile;

/// `sqrt(pi / 2)`: turns a mean absolute normal deviation into an SD.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;
pub const PAPER_SCALE: f64 = 1.25;
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Full-precision `sqrt(pi / 2)`.
    #[default]
    Exact,
    /// The rounded 1.25.
    PaperCompat,
}

impl ScaleMode {
    pub fn value(self) -> f64 {
        match self {
            Self::Exact => SQRT_HALF_PI,
            Self::PaperCompat => PAPER_SCALE,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deviate {
    /// 1.96.
    #[default]
    Normal,
    /// Two-sided 95% Student t quantile on `n - 1` df.
    StudentT,
}

impl Deviate {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Self::Normal => Z_95,
            Self::StudentT => student_t_quantile(0.975, (n.max(2) - 1) as f64),
        }
    }
}

/// Sign pattern for the measurement-error term `+-SE_a +- SE_b * M1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eqn5Convention {
    /// `+SE_a + SE_b * M1`.
    #[default]
    Worst,
    /// `+SE_a - SE_b * M1`.
    PlusMinus,
    /// `-SE_a + SE_b * M1`.
    MinusPlus,
}

impl Eqn5Convention {
    pub const ALL: [Self; 3] = [Self::Worst, Self::PlusMinus, Self::MinusPlus];

    fn signs(self) -> (f64, f64) {
        match self {
            Self::Worst => (1.0, 1.0),
            Self::PlusMinus => (1.0, -1.0),
            Self::MinusPlus => (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoaOptions {
    pub scale: ScaleMode,
    pub deviate: Deviate,
    pub eqn5: Eqn5Convention,
}

impl LoaOptions {
    /// Scale 1.25 and z = 1.96.
    pub fn paper_compat() -> Self {
        Self {
            scale: ScaleMode::PaperCompat,
            deviate: Deviate::Normal,
            eqn5: Eqn5Convention::Worst,
        }
    }
}

/// `|residual| = a + b * M1` and the derived `SD = scale * (a + b * M1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoaModel {
    pub a: f64,
    pub b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub scale: f64,
    pub z: f64,
    pub n: usize,
    pub options: LoaOptions,
}

impl LoaModel {
    /// A model from known coefficients, e.g. published ones.
    pub fn from_coefficients(a: f64, b: f64, se_a: f64, se_b: f64, n: usize, options: LoaOptions) -> Self {
        Self {
            a,
            b,
            se_a,
            se_b,
            scale: options.scale.value(),
            z: options.deviate.value(n),
            n,
            options,
        }
    }

    pub fn sd(&self, m1: f64) -> f64 {
        self.scale * (self.a + self.b * m1)
    }

    /// Signed error term `z * scale * (+-SE_a +- SE_b * m1)`.
    pub fn error_term(&self, m1: f64) -> f64 {
        let (sa, sb) = self.options.eqn5.signs();
        self.z * self.scale * (sa * self.se_a + sb * self.se_b * m1)
    }

    pub fn with_eqn5(mut self, eqn5: Eqn5Convention) -> Self {
        self.options.eqn5 = eqn5;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoaBand {
    pub m1: f64,
    pub fitted: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
    pub error_term: f64,
    pub lower_inner: f64,
    pub lower_outer: f64,
    pub upper_inner: f64,
    pub upper_outer: f64,
}

/// OLS of the absolute fit residuals on M1.
pub fn fit_loa(fit: &WlpFit, options: LoaOptions) -> Result<LoaModel, AgreementError> {
    let n = fit.residuals.len();
    if n < 3 {
        return Err(AgreementError::TooFewPoints {
            operation: "fit_loa",
            n,
            min: 3,
        });
    }
    let max_m2 = fit.m2.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let max_res = fit.residuals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_res < 1e-12 * max_m2.max(f64::MIN_POSITIVE) {
        return Err(AgreementError::DegenerateInput {
            operation: "fit_loa",
            detail: "residuals are all zero".into(),
        });
    }
    let x = &fit.m1;
    let y: Vec<f64> = fit.residuals.iter().map(|r| r.abs()).collect();
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(AgreementError::DegenerateInput {
            operation: "fit_loa",
            detail: "zero variance in m1".into(),
        });
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(&y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    let sigma2 = sse / (nf - 2.0);
    let se_b = (sigma2 / sxx).sqrt();
    let se_a = (sigma2 * (1.0 / nf + mx * mx / sxx)).sqrt();

    let model = LoaModel::from_coefficients(a, b, se_a, se_b, n, options);
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    for m1 in [lo, hi] {
        let sd = model.sd(m1);
        if sd <= 0.0 {
            return Err(AgreementError::NegativeSd { m1, sd });
        }
    }
    Ok(model)
}

/// Limits and error-term bounds at one M1 value.
pub fn loa_band(model: &LoaModel, line: impl Into<Line>, m1: f64) -> Result<LoaBand, AgreementError> {
    if !m1.is_finite() || m1 < 0.0 {
        return Err(AgreementError::InvalidArgument(format!("m1 must be finite and nonnegative, got {m1}")));
    }
    let sd = model.sd(m1);
    if sd <= 0.0 {
        return Err(AgreementError::NegativeSd { m1, sd });
    }
    let fitted = line.into().at(m1);
    let half = model.z * sd;
    let (lower, upper) = (fitted - half, fitted + half);
    let e = model.error_term(m1);
    Ok(LoaBand {
        m1,
        fitted,
        sd,
        lower,
        upper,
        error_term: e,
        lower_inner: lower + e,
        lower_outer: lower - e,
        upper_inner: upper - e,
        upper_outer: upper + e,
    })
}
