//! Batch front end for `hcrstat`: configuration, the full analysis run, plot
//! data export and input validation.
//!
//! The binary in `main.rs` is a thin clap layer over this crate. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | configuration error (the message names the offending field) |
//! | 3 | data error: unreadable or invalid input, or an output write failure |
//! | 4 | degenerate statistics; outputs are written first and the failing operations named |

pub mod config;
pub mod plot;
pub mod report;
pub mod validate;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub use config::{AnalysisConfig, InputSource};
pub use plot::{emit_plot_data, sample_band, PlotManifest, BAND_SAMPLES};
pub use report::{load_dataset, run_analysis, run_analysis_on, AnalysisReport, Dataset, Diagnostic, DiagnosticKind};
pub use validate::{validate_input, ValidationSummary};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_DEGENERATE: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {field}: {message}")]
    Config { field: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Data {
        context: String,
        #[source]
        source: hcrstat::DataError,
    },
    #[error("{path}: {count} violation(s)")]
    Invalid { path: PathBuf, count: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } => EXIT_CONFIG,
            Self::Io { .. } | Self::Data { .. } | Self::Invalid { .. } => EXIT_DATA,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
