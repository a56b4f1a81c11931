use std::path::PathBuf;

use hcrstat::agreement::MIN_RESAMPLES;
use hcrstat::{Deviate, Eqn5Convention, LoaOptions, Region, ScaleMode, WeightScheme};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "path", rename_all = "kebab-case")]
pub enum InputSource {
    Path(PathBuf),
    /// The published aggregate dataset compiled into the library.
    PaperData,
}

/// Everything one `analyze` run depends on.
///
/// Output locations are deliberately not part of the serialized echo, so a
/// report does not change when it is written somewhere else.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub input: InputSource,
    pub year_a: i32,
    pub year_b: i32,
    pub regions: Vec<Region>,
    /// Scale 1.25 instead of sqrt(pi / 2).
    pub paper_compat: bool,
    pub deviate: Deviate,
    pub weights: WeightScheme,
    pub eqn5: Eqn5Convention,
    pub seed: u64,
    /// 0 disables the bootstrap interval.
    pub n_resamples: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub plot_data: Option<PathBuf>,
    #[serde(skip)]
    pub stdout_json: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            input: InputSource::PaperData,
            year_a: 2017,
            year_b: 2018,
            regions: Region::ALL.to_vec(),
            paper_compat: false,
            deviate: Deviate::Normal,
            weights: WeightScheme::Uniform,
            eqn5: Eqn5Convention::Worst,
            seed: 0,
            n_resamples: 2000,
            output: None,
            plot_data: None,
            stdout_json: false,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |field, message: String| Err(CliError::Config { field, message });
        if self.year_a == self.year_b {
            return fail("year_b", format!("must differ from year_a (both are {})", self.year_a));
        }
        if self.regions.is_empty() {
            return fail("regions", "at least one region is required".into());
        }
        if let Some(dup) = self.regions.iter().enumerate().find_map(|(i, r)| self.regions[..i].contains(r).then_some(r)) {
            return fail("regions", format!("`{dup}` listed twice"));
        }
        if self.n_resamples != 0 && self.n_resamples < MIN_RESAMPLES {
            return fail(
                "n_resamples",
                format!("{} is below the minimum of {MIN_RESAMPLES} (use 0 to disable the bootstrap)", self.n_resamples),
            );
        }
        if self.weights == WeightScheme::Given {
            return fail("weights", "caller-supplied weights are not available from the command line".into());
        }
        Ok(())
    }

    pub fn loa_options(&self) -> LoaOptions {
        LoaOptions {
            scale: if self.paper_compat { ScaleMode::PaperCompat } else { ScaleMode::Exact },
            deviate: self.deviate,
            eqn5: self.eqn5,
        }
    }

    pub fn bootstrap(&self) -> Option<(u64, usize)> {
        (self.n_resamples > 0).then_some((self.seed, self.n_resamples))
    }
}
