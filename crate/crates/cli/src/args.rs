use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "statexfer",
    version,
    about = "State transfer through disordered spin chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a chain and write it as JSON.
    Build(BuildArgs),
    /// Optimal encoding and fidelities for one chain, window pair and time.
    Fidelity(FidelityArgs),
    /// Disorder sweep over coupling and field strengths, as CSV.
    Sweep(SweepArgs),
    /// Re-optimize the Apollaro end couplings, or map the objective.
    Optimize(OptimizeArgs),
    /// Check multi-excitation amplitudes against determinants.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Uniform,
    Apollaro,
    Pst,
    Quadratic,
    File,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub model: Model,
    #[arg(long, default_value_t = 51)]
    pub n: usize,
    /// Apollaro end coupling J₁ = J_{N−1}.
    #[arg(long)]
    pub x: Option<f64>,
    /// Apollaro next coupling J₂ = J_{N−2}.
    #[arg(long)]
    pub y: Option<f64>,
    /// Chain JSON, for `--model file`.
    #[arg(long)]
    pub chain: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Scale couplings so the largest is 1 and report the factor.
    #[arg(long)]
    pub rescale: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `auto` or a non-negative time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeArg {
    Auto,
    At(f64),
}

impl FromStr for TimeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TimeArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(TimeArg::At(t)),
            _ => Err(format!("expected `auto` or a non-negative time, got `{s}`")),
        }
    }
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 1)]
    pub window_in: usize,
    #[arg(long, default_value_t = 1)]
    pub window_out: usize,
    #[arg(long, default_value = "auto")]
    pub time: TimeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `min:max:step` or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<f64>, _> = s.split(':').map(str::parse::<f64>).collect();
        match parts
            .map_err(|e| format!("bad range `{s}`: {e}"))?
            .as_slice()
        {
            [v] => Ok(Range {
                min: *v,
                max: *v,
                step: 0.0,
            }),
            [min, max, step] => Ok(Range {
                min: *min,
                max: *max,
                step: *step,
            }),
            _ => Err(format!("expected `value` or `min:max:step`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingModeArg {
    Additive,
    Multiplicative,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldModeArg {
    Additive,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Normal,
    Uniform,
}

/// `ideal`, `per-sample` or a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepTime {
    Ideal,
    PerSample,
    At(f64),
}

impl FromStr for SweepTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(SweepTime::Ideal),
            "per-sample" => Ok(SweepTime::PerSample),
            _ => match s.parse::<f64>() {
                Ok(t) if t >= 0.0 && t.is_finite() => Ok(SweepTime::At(t)),
                _ => Err(format!(
                    "expected `ideal`, `per-sample` or a time, got `{s}`"
                )),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Sweep descriptor JSON; overrides every other sweep flag.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    /// Output window size, if different from `--window`.
    #[arg(long)]
    pub window_out: Option<usize>,
    #[arg(long, default_value = "ideal")]
    pub time: SweepTime,
    #[arg(long, value_enum, default_value = "additive")]
    pub coupling_mode: CouplingModeArg,
    #[arg(long, value_enum, default_value = "additive")]
    pub field_mode: FieldModeArg,
    #[arg(long, value_enum, default_value = "normal")]
    pub dist: DistArg,
    #[arg(long, default_value = "0:0.2:0.05")]
    pub sigma_j: Range,
    #[arg(long, default_value = "0:0.2:0.05")]
    pub sigma_b: Range,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.75)]
    pub quantile: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 51)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    /// Half-width of uniform additive coupling errors; 0 optimizes the
    /// disorder-free fidelity.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.8)]
    pub y0: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1000)]
    pub final_samples: usize,
    #[arg(long, default_value_t = 0.75)]
    pub quantile: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate the objective on a grid instead; needs `--landscape-y` too.
    #[arg(long, requires = "landscape_y")]
    pub landscape_x: Option<Range>,
    #[arg(long, requires = "landscape_x")]
    pub landscape_y: Option<Range>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
