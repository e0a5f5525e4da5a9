//! Command line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "kendall",
    version,
    about = "Fluctuation laws of Kendall random walks: evaluate, simulate, compare"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an analytic statistic on a grid and write CSV or JSON
    Eval(EvalArgs),
    /// Estimate a statistic by Monte Carlo path simulation
    Simulate(SimulateArgs),
    /// Evaluate and simulate the same statistic, then write a comparison
    /// report (exit 0 when every grid point is within 4 standard errors,
    /// exit 3 otherwise)
    Compare(CompareArgs),
    /// Convolve two step laws and tabulate the result
    Convolve(ConvolveArgs),
}

/// Step-law families exposed on the command line.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// Symmetric two-point law at +-scale
    Point,
    /// Symmetric Pareto law with index 2 alpha
    Pareto,
    /// Kendall alpha-stable law
    Stable,
    /// Law tabulated in a CSV file of `t,F` rows
    Table,
}

impl LawKind {
    pub fn name(self) -> &'static str {
        match self {
            LawKind::Point => "point",
            LawKind::Pareto => "pareto",
            LawKind::Stable => "stable",
            LawKind::Table => "table",
        }
    }
}

/// Flags selecting the (first) step law.
#[derive(Args, Debug)]
pub struct LawArgs {
    /// Step-law family
    #[arg(long, value_enum)]
    pub law: LawKind,

    /// Stability exponent alpha > 0, shared by every law in a run
    #[arg(long)]
    pub alpha: f64,

    /// Magnitude of the point law
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    /// Moment parameter of the stable law
    #[arg(long = "m-alpha", default_value_t = 1.0)]
    pub m_alpha: f64,

    /// CSV file of `t,F` rows tabulating the CDF on t >= 0 (the negative
    /// side is generated by symmetry); required by --law table
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// Flags selecting the second law of a convolution.
#[derive(Args, Debug)]
pub struct Law2Args {
    /// Family of the second convolution factor
    #[arg(long, value_enum)]
    pub law2: LawKind,

    /// Magnitude of the second point law
    #[arg(long, default_value_t = 1.0)]
    pub scale2: f64,

    /// Moment parameter of the second stable law
    #[arg(long = "m-alpha2", default_value_t = 1.0)]
    pub m_alpha2: f64,

    /// Table file for the second law
    #[arg(long)]
    pub table2: Option<PathBuf>,
}

/// Statistics reachable from eval, simulate and compare. Epoch laws are
/// tabulated over n = 1..=N; the others over the --t-grid.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatName {
    /// CDF of the step law
    Cdf,
    /// Williamson transform of the step law
    G,
    /// Tail companion H of the transform
    H,
    /// CDF of the n-fold convolution power
    FnCdf,
    /// Mass of (0, t) under the n-step transition law from x
    TransitionCdf,
    /// Truncated moment of order alpha over (0, a) from y (grid is y)
    TruncMoment,
    /// Kernel-weighted half-line mass at fixed y = --x and level --a
    PsiIntegral,
    /// First iterated fluctuation integral I_n(a, t)
    IntI,
    /// Second iterated fluctuation integral II_n(a, t)
    IntIi,
    /// First strict ascending ladder epoch pmf, rows n = 1..=N
    TauPmf,
    /// First weak descending ladder epoch pmf, rows n = 1..=N
    TauWeakDescPmf,
    /// First strict descending ladder epoch pmf (simulation only)
    TauStrictDescPmf,
    /// First weak ascending ladder epoch pmf (simulation only)
    TauWeakAscPmf,
    /// Joint ladder law P(tau_a = n, X_tau <= t) over the t grid
    JointLadder,
    /// Ladder height CDF P(X_tau <= t) over the t grid
    LadderHeightCdf,
    /// Running maximum CDF P(max <= t) at fixed n over the t grid
    MaxCdf,
    /// Running minimum law P(min < t) at fixed n over the t grid (t < 0)
    MinCdf,
    /// Convolution of two laws; use the convolve subcommand
    ConvCdf,
}

impl StatName {
    pub fn name(self) -> &'static str {
        match self {
            StatName::Cdf => "cdf",
            StatName::G => "g",
            StatName::H => "h",
            StatName::FnCdf => "fn-cdf",
            StatName::TransitionCdf => "transition-cdf",
            StatName::TruncMoment => "trunc-moment",
            StatName::PsiIntegral => "psi-integral",
            StatName::IntI => "int-i",
            StatName::IntIi => "int-ii",
            StatName::TauPmf => "tau-pmf",
            StatName::TauWeakDescPmf => "tau-weak-desc-pmf",
            StatName::TauStrictDescPmf => "tau-strict-desc-pmf",
            StatName::TauWeakAscPmf => "tau-weak-asc-pmf",
            StatName::JointLadder => "joint-ladder",
            StatName::LadderHeightCdf => "ladder-height-cdf",
            StatName::MaxCdf => "max-cdf",
            StatName::MinCdf => "min-cdf",
            StatName::ConvCdf => "conv-cdf",
        }
    }
}

/// Statistics of the convolve subcommand.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvStat {
    /// Mass the convolution puts on the open interval (0, t)
    ConvCdf,
    /// Williamson transform of the convolution
    ConvG,
}

impl ConvStat {
    pub fn name(self) -> &'static str {
        match self {
            ConvStat::ConvCdf => "conv-cdf",
            ConvStat::ConvG => "conv-g",
        }
    }
}

/// Evaluation mode for quantities with both a closed form and a recurrence.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Closed,
    Recurrence,
}

impl From<ModeArg> for kendall::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Closed => kendall::Mode::Closed,
            ModeArg::Recurrence => kendall::Mode::Recurrence,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

/// An evaluation grid `min:max:count`, inclusive of both end points.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected min:max:count, got {s:?}"));
    }
    let min: f64 = parts[0].parse().map_err(|_| format!("bad grid minimum {:?}", parts[0]))?;
    let max: f64 = parts[1].parse().map_err(|_| format!("bad grid maximum {:?}", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad grid count {:?}", parts[2]))?;
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(format!("grid needs finite min < max, got {min} and {max}"));
    }
    if count < 2 {
        return Err(format!("grid needs at least 2 points, got {count}"));
    }
    Ok(GridSpec { min, max, count })
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub law: LawArgs,

    /// Statistic to evaluate
    #[arg(long, value_enum)]
    pub stat: StatName,

    /// Crossing level a >= 0 (required by the ladder statistics)
    #[arg(long)]
    pub a: Option<f64>,

    /// Epoch count / convolution order, depending on the statistic
    #[arg(long)]
    pub n: Option<u32>,

    /// Fixed start or inner point for transition-cdf and psi-integral
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,

    /// Evaluation grid min:max:count
    #[arg(long = "t-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub t_grid: Option<GridSpec>,

    /// Closed form or kernel recurrence, where both exist
    #[arg(long, value_enum, default_value_t = ModeArg::Closed)]
    pub mode: ModeArg,

    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub law: LawArgs,

    /// Statistic to estimate
    #[arg(long, value_enum)]
    pub stat: StatName,

    /// Crossing level a >= 0
    #[arg(long)]
    pub a: Option<f64>,

    /// Epoch count of the statistic
    #[arg(long)]
    pub n: Option<u32>,

    /// Evaluation grid min:max:count for height and extreme laws
    #[arg(long = "t-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub t_grid: Option<GridSpec>,

    /// Number of simulated paths
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,

    /// Seed of the deterministic path streams
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Path length; derived from the statistics when absent
    #[arg(long)]
    pub horizon: Option<u32>,

    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub law: LawArgs,

    /// Statistic to compare (must have both an analytic form and an
    /// estimator)
    #[arg(long, value_enum)]
    pub stat: StatName,

    /// Crossing level a >= 0
    #[arg(long)]
    pub a: Option<f64>,

    /// Epoch count of the statistic
    #[arg(long)]
    pub n: Option<u32>,

    /// Evaluation grid min:max:count for height and extreme laws
    #[arg(long = "t-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub t_grid: Option<GridSpec>,

    /// Number of simulated paths
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,

    /// Seed of the deterministic path streams
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Path length; derived from the statistics when absent
    #[arg(long)]
    pub horizon: Option<u32>,

    /// Analytic side evaluation mode
    #[arg(long, value_enum, default_value_t = ModeArg::Closed)]
    pub mode: ModeArg,

    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Reports are always JSON; csv is rejected
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct ConvolveArgs {
    #[command(flatten)]
    pub law: LawArgs,

    #[command(flatten)]
    pub law2: Law2Args,

    /// Quantity of the convolution to tabulate
    #[arg(long, value_enum, default_value_t = ConvStat::ConvCdf)]
    pub stat: ConvStat,

    /// Evaluation grid min:max:count (t > 0)
    #[arg(long = "t-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub t_grid: Option<GridSpec>,

    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}
