use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "latshell", version, about = "Lattice point counts near convex surfaces and phase level sets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GlobalOpts {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "LATSHELL_WORKERS")]
    pub workers: Option<usize>,
    /// JSON file with parameters; flags given on the command line win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// CSV destination (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON summary destination; `-` for stdout. Defaults to `<out>.json` when `--out` is given.
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
    /// Write `NA` for wall times so reruns are byte-identical.
    #[arg(long, global = true, num_args = 0, default_missing_value = "true")]
    pub no_timing: Option<bool>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count lattice points in a shell R <= ||k|| <= R + delta.
    CountShell(ShellArgs),
    /// Count box pairs near the level set phi(n, m) = q^beta.
    CountPairs(PairArgs),
    /// Ball counts and discrepancy over a grid of radii.
    DiscrepancyScan(DiscrepancyArgs),
    /// Certify the Monge-Ampere determinant on level sets.
    MaCheck(MaArgs),
    /// Discrete s-energies over a grid of q.
    EnergyScan(EnergyArgs),
    /// Closed-form sharpness counts over a grid of t.
    SharpnessDemo(SharpnessArgs),
    /// Log-log fit of two columns of a CSV file.
    Fit(FitArgs),
    /// Run a named experiment.
    Preset(PresetArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CountShell(_) => "count-shell",
            Command::CountPairs(_) => "count-pairs",
            Command::DiscrepancyScan(_) => "discrepancy-scan",
            Command::MaCheck(_) => "ma-check",
            Command::EnergyScan(_) => "energy-scan",
            Command::SharpnessDemo(_) => "sharpness-demo",
            Command::Fit(_) => "fit",
            Command::Preset(_) => "preset",
        }
    }
}

/// Body selection shared by the body-based subcommands.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BodyArgs {
    /// `ball`, `pball`, `ellipsoid`, or a JSON descriptor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<String>,
    /// Exponent of a p-ball (even).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    /// Ellipsoid matrix, `[[2,1],[1,3]]` or `2,1;1,3`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ShellArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    /// Radius, or a list `1,2,5` / range `2:100:2`.
    #[arg(long = "R", alias = "r")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// `closed` or `half_open`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    /// `fiber` or `brute`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PairArgs {
    /// `parabolic`, `diff_gauge`, or a JSON descriptor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    /// Dilation parameter(s).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    /// Alternative to `--q`: uses `q = t^(d+1)`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Thickness(es).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Box constant.
    #[arg(long = "C", alias = "c")]
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    /// `diff_weight` or `brute`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Required slope of `q^-d count` against `q`, per delta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_slope: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<String>,
    /// Upper bound on `second_half_max / first_half_max` of the bound ratios.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_half_ratio: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    #[arg(long = "R", alias = "r")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    /// Normalizing exponent `e` in `|D| / R^e` (default `d - 2 + 20/43`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_slope: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MaArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub body: BodyArgs,
    /// Level(s) t.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thickness: Option<String>,
    /// Finite-difference step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    /// `2` or `4`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<String>,
    /// Add pairs placed along the coordinate axes.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_probes: Option<bool>,
    /// `pass` (default) or `fail`: the certification outcome that counts as success.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct EnergyArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<String>,
    /// Exponents, e.g. `2/3,4/3` (default all ones).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[arg(long = "C", alias = "c")]
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    /// Alternative to `--q`: uses `q = t^(d+1)`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Largest allowed `|slope|` of log E against log q.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<String>,
    /// Largest allowed `max E / min E`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SharpnessArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long = "C", alias = "c")]
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Column used as x (default `q` if present, else the first column).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    /// Column used as y (default `count` if present, else the second column).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_slope: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    /// One of the names printed by `preset list`.
    pub name: String,
}
