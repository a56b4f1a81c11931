//! Method-agreement analysis: least-products regression, V-shaped limits of
//! agreement, interchangeability thresholds and influence classes.

mod ci;
mod influence;
mod loa;
mod pipeline;
mod threshold;
mod wlp;

pub use ci::{analytic_ci, bootstrap_ci, wlp_confidence_intervals, CiMethod, CiOptions, CoefficientCis, MIN_RESAMPLES};
pub use influence::{classify_influence, InfluenceClass, InfluenceKind};
pub use loa::{fit_loa, loa_band, Deviate, Eqn5Convention, LoaBand, LoaModel, LoaOptions, ScaleMode, PAPER_SCALE, SQRT_HALF_PI, Z_95};
pub use pipeline::{agreement_pipeline, AgreementOptions, AgreementResult, ClassCounts, PointInfluence, ThresholdReport};
pub use threshold::{interchange_threshold, BandEdge, Crossing, EdgeSet};
pub use wlp::{fit_wlp, fit_wlp_scheme, WeightScheme, WlpFit};

use serde::{Deserialize, Serialize};

use crate::stat_tests::StatsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgreementError {
    #[error("{operation}: degenerate input: {detail}")]
    DegenerateInput { operation: &'static str, detail: String },
    #[error("fit_wlp: zero weighted covariance, slope sign undefined")]
    UndefinedSign,
    #[error("{operation}: {n} points, need at least {min}")]
    TooFewPoints { operation: &'static str, n: usize, min: usize },
    #[error("loa: standard deviation {sd} is not positive at m1 = {m1}")]
    NegativeSd { m1: f64, sd: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl AgreementError {
    /// Name of the operation that failed, for diagnostics.
    pub fn operation(&self) -> &'static str {
        match self {
            Self::DegenerateInput { operation, .. } | Self::TooFewPoints { operation, .. } => operation,
            Self::UndefinedSign => "fit_wlp",
            Self::NegativeSd { .. } => "loa_band",
            Self::InvalidArgument(_) => "agreement",
            Self::Stats(_) => "ks_normality",
        }
    }
}

/// `m2 = slope * m1 + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    pub fn at(&self, m1: f64) -> f64 {
        self.slope * m1 + self.intercept
    }
}

impl From<&WlpFit> for Line {
    fn from(fit: &WlpFit) -> Self {
        fit.line()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    /// Orders the endpoints.
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            lower: a.min(b),
            upper: a.max(b),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}
