use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "wz", version, about = "Binary Wyner-Ziv coding with compound LDGM-LDPC codes")]
pub struct Cli {
    /// Master seed; `run` uses it in place of each experiment's own seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for trial fan-out (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output file, or output directory for `build` and `run`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a compound code and write its matrices and manifest.
    Build(BuildArgs),
    /// Quantize each source word onto the LDGM code.
    Quantize(QuantizeArgs),
    /// Quantize and emit the transmitted syndrome `z2` of each word.
    Encode(QuantizeArgs),
    /// Recover each source estimate from `z2` and side information.
    Decode(DecodeArgs),
    /// Execute every experiment in a config file.
    Run(RunArgs),
    /// Sample the Wyner-Ziv bound as plot data.
    Bound(BoundArgs),
    /// Recompute the ten-bit worked example and compare with its printed values.
    VerifyExample,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Catalog id, catalog file path, or `example` for the ten-bit fixture
    /// (which takes no dimensions).
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub zeta: usize,
    #[arg(long, default_value_t = 10.0)]
    pub poisson_lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub imax: usize,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    /// Code directory written by `build`.
    #[arg(long)]
    pub code: PathBuf,
    /// Bit file of source words.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Source-message strength (default `2 R1`).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Bias threshold for fixing variables.
    #[arg(long, default_value_t = 0.8)]
    pub t: f64,
    /// Message-passing iterations per round.
    #[arg(long, default_value_t = 25)]
    pub iters: usize,
    #[arg(long)]
    pub damping: Option<f64>,
    /// Carry messages across rounds.
    #[arg(long)]
    pub warm_start: bool,
    /// Search all messages instead (at most 24 message bits).
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Bit file of `z2` words.
    #[arg(long)]
    pub syndrome: PathBuf,
    /// Bit file of side-information words.
    #[arg(long)]
    pub side: PathBuf,
    /// Source-to-side-information crossover.
    #[arg(long)]
    pub p: f64,
    /// Expected quantizer distortion.
    #[arg(long)]
    pub d1: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config with an `experiments` array.
    pub config: PathBuf,
    /// Run only the named experiments.
    #[arg(long)]
    pub only: Vec<String>,
    /// Override the trial count of every experiment.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}
