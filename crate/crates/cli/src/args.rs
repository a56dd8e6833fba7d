use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bjnl", version, about = "Bayesian joint network learning")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Hyperparameter file (TOML or JSON) for fit, scenario file for simulate.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark scenario: truth matrices, condition data, manifest.
    Simulate(SimulateArgs),
    /// Run the sampler on a data manifest and write estimates.
    Fit(FitArgs),
    /// Score precision estimates against simulated truth.
    Eval(EvalArgs),
    /// Posterior distributions of graph metrics.
    Metrics(MetricsArgs),
    /// Stationarity checks on stored traces.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file; `--config` is used when omitted.
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkArg {
    Logistic,
    Probit,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Data manifest (TOML or JSON).
    pub manifest: PathBuf,
    /// Choose the edge threshold to keep the estimated FDR at or below this.
    #[arg(long)]
    pub fdr_target: Option<f64>,
    #[arg(long, value_enum)]
    pub link: Option<LinkArg>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub iter: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Significance level of the differential strength test.
    #[arg(long, default_value_t = 0.01)]
    pub level: f64,
    /// Use effective sample sizes in the differential t-tests.
    #[arg(long)]
    pub ess_corrected: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory holding `precision_<label>.csv` estimates (a fit output or
    /// any external estimator).
    pub fit_dir: PathBuf,
    /// Directory written by `simulate`.
    pub truth_dir: PathBuf,
    /// Edge threshold for differential edges (default: the fit's, else 0.1).
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub fit_dir: PathBuf,
    /// Histogram bins per metric.
    #[arg(long, default_value_t = 30)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub fit_dir: PathBuf,
}
