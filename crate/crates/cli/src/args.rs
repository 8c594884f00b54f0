use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tmconv", version, about = "One-bit Tsetlin Machine convergence lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format. Oracle commands default to text, simulate/verify to
    /// json and sweep to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print s1..s6 and c1..c4 for an environment.
    Thresholds(EnvArgs),
    /// Print the action pairs the team can settle into at a given s.
    Predict {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(short = 's')]
        s: f64,
    },
    /// Print alpha/beta/gamma of the four conditional chains.
    Chains {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(short = 's')]
        s: f64,
        /// States per action half (only affects the printed chain length).
        #[arg(short = 'N', default_value_t = 1)]
        depth: u32,
    },
    /// Stationary distribution of a birth-death chain on 0..2N.
    Stationary {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(short = 'N')]
        depth: u32,
    },
    /// Run Monte Carlo trials and report the outcome.
    Simulate(RunArgs),
    /// Like simulate; the exit code encodes the verdict (0 consistent,
    /// 1 inconsistent, 4 indeterminate).
    Verify(RunArgs),
    /// Repeat an experiment over a grid of s or c values.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct EnvArgs {
    /// P(y = 1 | x = 1).
    #[arg(short = 'a', required_unless_present = "noise_free", conflicts_with = "noise_free")]
    pub a: Option<f64>,
    /// P(y = 1 | x = 0).
    #[arg(short = 'b', required_unless_present = "noise_free", conflicts_with = "noise_free")]
    pub b: Option<f64>,
    /// P(x = 1). Not needed when sweeping over c.
    #[arg(short = 'c')]
    pub c: Option<f64>,
    /// Use y = x (a = 1, b = 0).
    #[arg(long)]
    pub noise_free: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    /// Granularity s. Required except for sweeps over s.
    #[arg(short = 's')]
    pub s: Option<f64>,
    /// States per action half [default: 50, or 2 with --noise-free].
    #[arg(short = 'N')]
    pub depth: Option<u32>,
    /// Training steps per trial [default: 200000, or 10000 with --noise-free].
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Steps at the end of a trial used for the dominant pair [default: steps / 10].
    #[arg(long)]
    pub tail_window: Option<u64>,
    /// Base seed. TMCONV_SEED overrides it when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Allow more than 1e9 total simulated steps.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, requires_all = ["s_to", "s_step"], conflicts_with = "c_from")]
    pub s_from: Option<f64>,
    #[arg(long)]
    pub s_to: Option<f64>,
    #[arg(long)]
    pub s_step: Option<f64>,
    #[arg(long, requires_all = ["c_to", "c_step"])]
    pub c_from: Option<f64>,
    #[arg(long)]
    pub c_to: Option<f64>,
    #[arg(long)]
    pub c_step: Option<f64>,
}
