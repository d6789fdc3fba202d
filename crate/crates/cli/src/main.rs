mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exact construction and verification of differential systems for period
/// integrals of Calabi-Yau hypersurfaces in projective space.
#[derive(Debug, Parser)]
#[command(name = "tautsys", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for the JSON report; defaults to $TAUTSYS_OUT_DIR when set.
    #[arg(long, global = true, env = "TAUTSYS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Print the wall-clock time on stderr. Reports never contain timing.
    #[arg(long, global = true)]
    pub timing: bool,

    /// Random seed, recorded in every report and used by `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Build the base system (p = 0) or the scalar system for p-th derivatives.
    BuildSystem(BuildArgs),
    /// Check that a system annihilates the truncated period series.
    VerifyPeriods(VerifyArgs),
    /// Fourier-transform the scalar system and compare with the reference families.
    Fourier(FourierArgs),
    /// Decide a differential relation at one section.
    Membership(MembershipArgs),
    /// Run the membership test along a line of sections.
    Scan(ScanArgs),
    /// Check the multiplication maps and filtration generators.
    Surjectivity(SurjectivityArgs),
    /// Run the seeded property suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Labels used in the worked examples, interior monomial first.
    InteriorFirst,
    /// Graded lexicographic order.
    Grlex,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Dimension of the projective space.
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Ordering::InteriorFirst)]
    pub ordering: Ordering,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Derivative order; 0 gives the base system.
    #[arg(long, default_value_t = 0)]
    pub p: u32,
    /// Largest degree of the toric relations.
    #[arg(long, default_value_t = 2)]
    pub degree_bound: usize,
    /// Also build the vector system (p = 1, 2) and check it against the base system.
    #[arg(long)]
    pub vector: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub p: u32,
    /// Truncation order of the period series.
    #[arg(long, default_value_t = 10)]
    pub order: u32,
    #[arg(long, default_value_t = 2)]
    pub degree_bound: usize,
    /// Include the series in the report.
    #[arg(long)]
    pub emit_series: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FourierArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long, default_value_t = 2)]
    pub degree_bound: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every q-degree up to the bound.
    Full,
    /// Only the q-degrees that can reach the query degree.
    DegreeClass,
}

#[derive(Debug, Args, Serialize)]
pub struct MembershipArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Use the Fermat section.
    #[arg(long, conflicts_with = "point", required_unless_present = "point")]
    pub fermat: bool,
    /// Section coefficients, comma separated (e.g. 0,1,1 or 1/2,1,1).
    #[arg(long)]
    pub point: Option<String>,
    /// Derivative multi-index: 2e0, e1+e2 or a full list 0,1,1.
    #[arg(long)]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    pub mode: Mode,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: String,
    /// BASE:DIRECTION:PARAMS, e.g. 0,1,1:1,0,0:0,1,2.
    #[arg(long)]
    pub line: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SurjectivityArgs {
    /// Restrict to one dimension; by default d = 1, 2, 3.
    #[arg(long)]
    pub d: Option<usize>,
    /// Largest k + l for the multiplication maps.
    #[arg(long, default_value_t = 4)]
    pub max_total: u32,
    /// Largest p for the filtration check (dimensions 1 and 2).
    #[arg(long, default_value_t = 4)]
    pub max_p: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    /// Cases per property.
    #[arg(long, default_value_t = 10)]
    pub cases: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = commands::run(&cli);
    if cli.timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(report) => {
            if let Err(e) = commands::emit(&cli, &report) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
