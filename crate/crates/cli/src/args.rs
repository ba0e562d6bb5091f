use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdt_core::metrics::SvrWeights;

/// Parse, score, simulate and generate layout scripts.
///
/// Every global flag can also be set through an environment variable with
/// the `GDT_` prefix, e.g. `GDT_SEED=7`.
#[derive(Debug, Parser)]
#[command(name = "gdt", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for simulation runs and corpus generation.
    #[arg(long, global = true, env = "GDT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Simulated time per run.
    #[arg(long, global = true, env = "GDT_HORIZON", value_parser = parse_horizon)]
    pub horizon: Option<f64>,
    /// SVR weights as `cs,os`, non-negative and summing to 1.
    #[arg(long, global = true, env = "GDT_WEIGHTS", value_parser = parse_weights)]
    pub weights: Option<SvrWeights<f64>>,
    /// Metrics to compute when scoring. CS, OS, SVR and PMR are always
    /// reported; `esr` runs every hypothesis, `bleu` adds BLEU-4.
    #[arg(
        long,
        global = true,
        env = "GDT_METRICS",
        value_delimiter = ',',
        default_value = "svr,pmr,esr,bleu"
    )]
    pub metrics: Vec<Metric>,
    /// Output format of the score report.
    #[arg(long, global = true, env = "GDT_FORMAT", default_value = "json")]
    pub format: Format,
    /// Worker threads (default: one per core).
    #[arg(long, global = true, env = "GDT_JOBS")]
    pub jobs: Option<usize>,
    /// Output file (or directory for `generate`). Defaults to stdout.
    #[arg(long, global = true, env = "GDT_OUT")]
    pub out: Option<PathBuf>,
    /// Generator configuration file (TOML).
    #[arg(long, global = true, env = "GDT_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Svr,
    Pmr,
    Esr,
    Bleu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report what a script declares, and any parse problems.
    Parse { file: PathBuf },
    /// Score generated scripts against references.
    Score(ScoreArgs),
    /// Run a script in the simulation engine.
    Simulate {
        file: PathBuf,
        /// Print one line per event to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Write a prompt/sketch/code corpus.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["refs", "pairs"]))]
pub struct ScoreArgs {
    /// Directory of reference scripts, paired with `--hyps` by file name.
    #[arg(long, requires = "hyps")]
    pub refs: Option<PathBuf>,
    /// Directory of generated scripts.
    #[arg(long, requires = "refs")]
    pub hyps: Option<PathBuf>,
    /// Two-column file of `reference,hypothesis` paths, relative to the file.
    #[arg(long, conflicts_with_all = ["refs", "hyps"])]
    pub pairs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: Option<usize>,
    /// Walk every source/machine family combination in order. The count
    /// defaults to the size of the design space.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub layout_type: Option<String>,
    #[arg(long)]
    pub automation: Option<String>,
    #[arg(long)]
    pub industry: Option<String>,
    #[arg(long)]
    pub layout_category: Option<String>,
    #[arg(long)]
    pub machines: Option<usize>,
    /// Skip running each record through the engine.
    #[arg(long)]
    pub no_verify: bool,
}

fn parse_horizon(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(h) if h > 0.0 && h.is_finite() => Ok(h),
        _ => Err(format!("`{s}` is not a positive time")),
    }
}

fn parse_weights(s: &str) -> Result<SvrWeights<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [cs, os] = parts[..] else {
        return Err(format!("expected `cs,os`, got `{s}`"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    SvrWeights::new(num(cs)?, num(os)?).map_err(|e| e.to_string())
}
