use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcrstat::{Deviate, Eqn5Convention, Region, WeightScheme};
use hcrstat_cli::report::{render_summary, write_report};
use hcrstat_cli::{emit_plot_data, run_analysis, validate_input, AnalysisConfig, CliError, InputSource, EXIT_DATA, EXIT_DEGENERATE};

/// Method-agreement statistics for HCR count panels.
///
/// Exit codes: 0 success, 2 configuration error, 3 data or I/O error,
/// 4 degenerate statistics (outputs are still written).
#[derive(Parser)]
#[command(name = "hcrstat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and write a JSON report
    Analyze(AnalyzeArgs),
    /// Check a panel CSV and report coverage and every violation
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Print the summary as JSON on stdout
        #[arg(long)]
        stdout_json: bool,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "paper_data"]))]
struct AnalyzeArgs {
    /// Panel CSV with columns year,region,field,count
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the bundled published dataset
    #[arg(long)]
    paper_data: bool,
    #[arg(long, default_value_t = 2017)]
    year_a: i32,
    #[arg(long, default_value_t = 2018)]
    year_b: i32,
    #[arg(long, value_delimiter = ',', default_value = "world,us,chinese-mainland,other")]
    regions: Vec<Region>,
    /// Use the rounded SD scale factor 1.25
    #[arg(long)]
    paper_compat: bool,
    /// Normal deviate 1.96 for the limits (default)
    #[arg(long, conflicts_with = "t")]
    z: bool,
    /// Student t deviate on n - 1 degrees of freedom
    #[arg(long)]
    t: bool,
    #[arg(long, value_enum, default_value_t = Weights::Uniform)]
    weights: Weights,
    /// Sign convention of the measurement-error term
    #[arg(long, value_enum, default_value_t = Eqn5::Worst)]
    eqn5: Eqn5,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap resamples; 0 disables the bootstrap interval
    #[arg(long, default_value_t = 2000)]
    resamples: usize,
    /// Report path; defaults to report.json unless --stdout-json is given
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory for the figure CSVs and their manifest
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Print the report on stdout
    #[arg(long)]
    stdout_json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Uniform,
    Proportional,
}

#[derive(Clone, Copy, ValueEnum)]
enum Eqn5 {
    Worst,
    PlusMinus,
    MinusPlus,
}

impl AnalyzeArgs {
    fn into_config(self) -> AnalysisConfig {
        let output = match (self.output, self.stdout_json) {
            (Some(p), _) => Some(p),
            (None, false) => Some(PathBuf::from("report.json")),
            (None, true) => None,
        };
        AnalysisConfig {
            input: self.input.map_or(InputSource::PaperData, InputSource::Path),
            year_a: self.year_a,
            year_b: self.year_b,
            regions: self.regions,
            paper_compat: self.paper_compat,
            deviate: if self.t { Deviate::StudentT } else { Deviate::Normal },
            weights: match self.weights {
                Weights::Uniform => WeightScheme::Uniform,
                Weights::Proportional => WeightScheme::Proportional,
            },
            eqn5: match self.eqn5 {
                Eqn5::Worst => Eqn5Convention::Worst,
                Eqn5::PlusMinus => Eqn5Convention::PlusMinus,
                Eqn5::MinusPlus => Eqn5Convention::MinusPlus,
            },
            seed: self.seed,
            n_resamples: self.resamples,
            output,
            plot_data: self.plot_data,
            stdout_json: self.stdout_json,
        }
    }
}

fn analyze(config: AnalysisConfig) -> Result<u8, CliError> {
    let report = run_analysis(&config)?;
    if let Some(path) = &config.output {
        write_report(&report, path)?;
    }
    if let Some(dir) = &config.plot_data {
        let manifest = emit_plot_data(&report, dir)?;
        for o in &manifest.omitted {
            eprintln!("plot data: {} omitted: {}", o.file, o.reason);
        }
    }
    if config.stdout_json {
        print!("{}", report.to_json());
    }
    eprint!("{}", render_summary(&report));
    let failed: Vec<&str> = report.degenerate().filter_map(|d| d.operation).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("error: degenerate statistics in {}", failed.join(", "));
        Ok(EXIT_DEGENERATE)
    }
}

fn validate(input: PathBuf, stdout_json: bool) -> Result<u8, CliError> {
    let summary = validate_input(&input)?;
    if stdout_json {
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    }
    eprint!("{}", summary.render());
    Ok(if summary.is_valid() { 0 } else { EXIT_DATA })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args.into_config()),
        Command::Validate { input, stdout_json } => validate(input, stdout_json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
