//! Orchestration: resolve parsed arguments into a [`CommandSpec`], execute
//! it, write the outputs and the manifest, and map the outcome to the exit
//! code contract (0 clean, 2 partial results, 1 fatal).

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use trapstab::{
    coupled_boundaries, decoupled_boundaries, hill_boundary, sweep_grid, trace_eigenvalues,
    BoundaryCurve, GridSpec, IntegratorConfig,
};

use crate::cli::{Cli, Command};
use crate::manifest::{parse_manifest, write_manifest, CommandSpec, RunManifest};
use crate::output::{
    write_collisions_csv, write_curves_csv, write_grid_csv, write_grid_pgm, write_trace_csv,
};

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Every cell classified, every curve complete.
    Clean,
    /// Output files were written, but some cells failed or some curves were
    /// truncated; details went to stderr and the manifest.
    Partial,
}

/// Anything that aborts a run before (or while) writing outputs.
#[derive(Debug)]
pub enum CliError {
    Compute(trapstab::Error),
    Io { path: PathBuf, source: io::Error },
    Invalid(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Compute(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
            Self::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<trapstab::Error> for CliError {
    fn from(e: trapstab::Error) -> Self {
        Self::Compute(e)
    }
}

/// `n ≥ 2` uniform samples over `[lo, hi]`, endpoints exact.
fn uniform_samples(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Invalid(format!(
            "need at least 2 sample points, got {n}"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut qs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    qs[n - 1] = hi;
    Ok(qs)
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| CliError::Io { path, source })
}

/// Runs one resolved command, writing all outputs plus the manifest into
/// `out_dir` (created if missing). The returned manifest matches the file on
/// disk.
pub fn execute(spec: &CommandSpec, out_dir: &Path) -> Result<(RunManifest, RunStatus), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let started = Instant::now();
    let prefix = spec.prefix().to_string();
    let mut warnings: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut status = RunStatus::Clean;

    match spec {
        CommandSpec::Sweep {
            alpha,
            theta,
            q,
            a,
            nq,
            na,
            steps,
            ..
        } => {
            let grid_spec = GridSpec {
                q_min: q.0,
                q_max: q.1,
                a_min: a.0,
                a_max: a.1,
                nq: *nq,
                na: *na,
            };
            let cfg = IntegratorConfig::with_steps(*steps)?;
            let grid = sweep_grid(*alpha, *theta, grid_spec, cfg)?;
            let failed = grid.failed_count();
            if failed > 0 {
                eprintln!("trapstab: {failed} of {} cells failed to classify", grid.cells.len());
                status = RunStatus::Partial;
            }
            for (name, content) in [
                (format!("{prefix}_grid.csv"), write_grid_csv(&grid)),
                (format!("{prefix}_grid.pgm"), write_grid_pgm(&grid)),
            ] {
                write_file(out_dir, &name, &content)?;
                outputs.push(name);
            }
        }
        CommandSpec::Boundaries {
            alpha,
            theta,
            q,
            points,
            decoupled,
            ..
        } => {
            let qs = uniform_samples(q.0, q.1, *points)?;
            let mut curves: Vec<BoundaryCurve> = coupled_boundaries(*alpha, *theta, &qs)?;
            if *decoupled {
                curves.extend(decoupled_boundaries(*alpha, &qs)?);
            }
            let name = format!("{prefix}_curves.csv");
            write_file(out_dir, &name, &write_curves_csv(&curves))?;
            outputs.push(name);
        }
        CommandSpec::Hill {
            alpha,
            theta,
            nu,
            order,
            bracket,
            q,
            points,
            ..
        } => {
            let qs = uniform_samples(q.0, q.1, *points)?;
            let bounds = hill_boundary(*nu, *alpha, *theta, &qs, *order, *bracket)?;
            for w in &bounds.warnings {
                eprintln!("trapstab: {}", w.message);
                warnings.push(w.message.clone());
            }
            if !bounds.warnings.is_empty() {
                status = RunStatus::Partial;
            }
            let name = format!("{prefix}_curves.csv");
            write_file(out_dir, &name, &write_curves_csv(&bounds.curves))?;
            outputs.push(name);
        }
        CommandSpec::Trace {
            alpha,
            theta,
            q,
            a,
            samples,
            steps,
            ..
        } => {
            let cfg = IntegratorConfig::with_steps(*steps)?;
            let trace = trace_eigenvalues(*alpha, *theta, *q, *a, *samples, cfg)?;
            for (name, content) in [
                (format!("{prefix}_trace.csv"), write_trace_csv(&trace)),
                (format!("{prefix}_collisions.csv"), write_collisions_csv(&trace)),
            ] {
                write_file(out_dir, &name, &content)?;
                outputs.push(name);
            }
        }
    }

    let manifest = RunManifest {
        spec: spec.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_ms: started.elapsed().as_millis(),
        warnings,
        outputs,
    };
    write_file(
        out_dir,
        &format!("{prefix}_manifest.txt"),
        &write_manifest(&manifest),
    )?;
    Ok((manifest, status))
}

/// Turns parsed arguments into a resolved spec plus output directory;
/// `replay` loads the spec from its manifest instead.
fn resolve(command: Command) -> Result<(CommandSpec, PathBuf), CliError> {
    let prefix = |p: Option<String>, default: &str| p.unwrap_or_else(|| default.to_string());
    Ok(match command {
        Command::Sweep(args) => (
            CommandSpec::Sweep {
                alpha: args.alpha,
                theta: args.theta,
                q: args.q.pair(),
                a: args.a.pair(),
                nq: args.nq,
                na: args.na,
                steps: args.steps,
                prefix: prefix(args.out.prefix, "sweep"),
            },
            args.out.out_dir,
        ),
        Command::Boundaries(args) => (
            CommandSpec::Boundaries {
                alpha: args.alpha,
                theta: args.theta,
                q: args.q.pair(),
                points: args.points,
                decoupled: args.decoupled,
                prefix: prefix(args.out.prefix, "boundaries"),
            },
            args.out.out_dir,
        ),
        Command::Hill(args) => (
            CommandSpec::Hill {
                alpha: args.alpha,
                theta: args.theta,
                nu: args.nu,
                order: args.order,
                bracket: args.bracket.pair(),
                q: args.q.pair(),
                points: args.points,
                prefix: prefix(args.out.prefix, "hill"),
            },
            args.out.out_dir,
        ),
        Command::Trace(args) => (
            CommandSpec::Trace {
                alpha: args.alpha,
                theta: args.theta,
                q: args.q,
                a: args.a.pair(),
                samples: args.samples,
                steps: args.steps,
                prefix: prefix(args.out.prefix, "trace"),
            },
            args.out.out_dir,
        ),
        Command::Replay(args) => {
            let text = std::fs::read_to_string(&args.manifest).map_err(|source| CliError::Io {
                path: args.manifest.clone(),
                source,
            })?;
            let manifest = parse_manifest(&text).map_err(CliError::Invalid)?;
            let out_dir = args.out_dir.unwrap_or_else(|| {
                match args.manifest.parent() {
                    Some(p) if p != Path::new("") => p.to_path_buf(),
                    _ => PathBuf::from("."),
                }
            });
            (manifest.spec, out_dir)
        }
    })
}

/// Caps the rayon pool from `TRAPSTAB_THREADS` (0 or unset = automatic).
#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), CliError> {
    let raw = match std::env::var("TRAPSTAB_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(CliError::Invalid(format!("TRAPSTAB_THREADS: {e}"))),
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|e| CliError::Invalid(format!("TRAPSTAB_THREADS={raw:?}: {e}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), CliError> {
    Ok(())
}

/// Full program: parse, configure, execute, exit code.
pub fn main_impl() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap distinguishes real usage errors from --help/--version;
            // fold the former into the fatal exit code.
            let fatal = e.use_stderr();
            let _ = e.print();
            return if fatal { 1 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("trapstab: {e}");
        return 1;
    }
    let (spec, out_dir) = match resolve(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("trapstab: {e}");
            return 1;
        }
    };
    match execute(&spec, &out_dir) {
        Ok((_, RunStatus::Clean)) => 0,
        Ok((_, RunStatus::Partial)) => 2,
        Err(e) => {
            eprintln!("trapstab: {e}");
            1
        }
    }
}
