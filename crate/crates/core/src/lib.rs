//! Method-agreement statistics for Highly Cited Researcher (HCR) count panels.
//!
//! The crate is organised by analysis stage:
//!
//! - [`data`]: count panels, contingency tables, shares, growth, paired series
//!   and the bundled published dataset.
//! - [`stat_tests`]: Pearson chi-squared, Shapiro–Wilk, Lilliefors
//!   (Kolmogorov–Smirnov with estimated parameters), Spearman and Wilcoxon
//!   signed-rank.
//! - [`agreement`]: least-products regression, V-shaped limits of agreement,
//!   interchangeability thresholds and cross-field influence classes.
//!
//! Every operation is a pure function over immutable inputs. [`sim`] holds the
//! seeded Monte-Carlo oracles used to calibrate the tests.

pub mod agreement;
pub mod data;
pub mod dist;
pub mod sim;
pub mod stat_tests;

pub use agreement::{
    agreement_pipeline, classify_influence, fit_loa, fit_wlp, fit_wlp_scheme, interchange_threshold, loa_band,
    wlp_confidence_intervals, AgreementError, AgreementOptions, AgreementResult, BandEdge, CiMethod, CiOptions,
    CoefficientCis, Crossing, Deviate, EdgeSet, Eqn5Convention, InfluenceClass, InfluenceKind, Interval, Line,
    LoaBand, LoaModel, LoaOptions, ScaleMode, WeightScheme, WlpFit,
};
pub use data::{
    derive_contingency, growth_summary, load_panel, paired_series, paper_reference_data, shares,
    ConsistencyMode, ContingencyTable, DataError, Field, FieldRegionPanel, GrowthSummary, PairedSeries,
    PanelKey, Region, ShareBreakdown,
};
pub use stat_tests::{
    chi_squared_test, ks_normality, shapiro_wilk, spearman_matrix, wilcoxon_signed_rank, ChiSquaredResult,
    NormalityMethod, NormalityResult, SpearmanMatrix, StatsError, WilcoxonResult,
};
