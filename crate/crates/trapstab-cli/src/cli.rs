//! Argument grammar. Numeric windows use the `lo:hi` range syntax; angles
//! are degrees; all numerics accept scientific notation.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

/// An inclusive numeric interval written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn pair(self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("need finite lo < hi, got {lo}:{hi}"));
        }
        Ok(Range { lo, hi })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "trapstab",
    version,
    about = "Stability diagrams for coupled two-variable Mathieu systems",
    long_about = "Computes stability diagrams, boundary curves, and Floquet-multiplier traces \
                  for the coupled Mathieu system of planar-trap ion motion. Outputs are plain \
                  CSV/PGM files plus a key=value manifest that replays the run bit-for-bit."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every cell of a (q, a) window; writes grid CSV and PGM.
    Sweep(SweepArgs),
    /// Closed-form small-q boundary curves; writes curves CSV.
    Boundaries(BoundariesArgs),
    /// Natural-resonance curves from the truncated Hill determinant.
    Hill(HillArgs),
    /// Multiplier trajectories along a line of fixed q; writes trace and
    /// collision CSVs.
    Trace(TraceArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

/// Output placement, shared by every producing subcommand.
#[derive(Debug, Args)]
pub struct OutArgs {
    /// Directory for output files; created if missing.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File-name prefix; defaults to the subcommand name.
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// DC asymmetry ratio α (the second variable sees −αa); must be > 0.
    #[arg(long)]
    pub alpha: f64,
    /// Coupling angle θ in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// RF window as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Range,
    /// DC window as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Range,
    /// Cells along q; at least 2.
    #[arg(long)]
    pub nq: usize,
    /// Cells along a; at least 2.
    #[arg(long)]
    pub na: usize,
    /// RK4 steps per forcing period.
    #[arg(long, default_value_t = 2048)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BoundariesArgs {
    /// DC asymmetry ratio α; must be > 0.
    #[arg(long)]
    pub alpha: f64,
    /// Coupling angle θ in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// RF range to sample, as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Range,
    /// Number of q samples; at least 2.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Also emit the ± boundary curves of the two decoupled equations.
    #[arg(long)]
    pub decoupled: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct HillArgs {
    /// DC asymmetry ratio α; must be > 0.
    #[arg(long)]
    pub alpha: f64,
    /// Coupling angle θ in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// Characteristic exponent of the resonance family: 0 or 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub nu: u8,
    /// Truncation order N of the Hill determinant.
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    /// DC interval searched for determinant roots, as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Range,
    /// RF range to sample, as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Range,
    /// Number of q samples; at least 2.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// DC asymmetry ratio α; must be > 0.
    #[arg(long)]
    pub alpha: f64,
    /// Coupling angle θ in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// Fixed RF strength of the traced line.
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    /// DC interval swept, as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Range,
    /// Uniform samples over the interval; at least 2.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// RK4 steps per forcing period.
    #[arg(long, default_value_t = 2048)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by a previous run.
    pub manifest: PathBuf,
    /// Where to write the regenerated outputs; defaults to the directory
    /// containing the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
