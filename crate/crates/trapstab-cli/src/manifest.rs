//! The run manifest: a flat key=value file written next to every output,
//! recording the command, its full parameter set, the integrator
//! configuration, the tool version, wall time, and the output file list.
//! Everything except `wall_ms` is an input, so feeding a manifest back
//! through `replay` regenerates the outputs byte-for-byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::output::fmt_f64;

/// Fully resolved parameters of one producing subcommand; what `replay`
/// needs to repeat the run.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandSpec {
    Sweep {
        alpha: f64,
        theta: f64,
        q: (f64, f64),
        a: (f64, f64),
        nq: usize,
        na: usize,
        steps: usize,
        prefix: String,
    },
    Boundaries {
        alpha: f64,
        theta: f64,
        q: (f64, f64),
        points: usize,
        decoupled: bool,
        prefix: String,
    },
    Hill {
        alpha: f64,
        theta: f64,
        nu: u8,
        order: usize,
        bracket: (f64, f64),
        q: (f64, f64),
        points: usize,
        prefix: String,
    },
    Trace {
        alpha: f64,
        theta: f64,
        q: f64,
        a: (f64, f64),
        samples: usize,
        steps: usize,
        prefix: String,
    },
}

impl CommandSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sweep { .. } => "sweep",
            Self::Boundaries { .. } => "boundaries",
            Self::Hill { .. } => "hill",
            Self::Trace { .. } => "trace",
        }
    }

    pub fn prefix(&self) -> &str {
        match self {
            Self::Sweep { prefix, .. }
            | Self::Boundaries { prefix, .. }
            | Self::Hill { prefix, .. }
            | Self::Trace { prefix, .. } => prefix,
        }
    }
}

/// Everything recorded about one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub spec: CommandSpec,
    /// Tool version that produced the outputs.
    pub version: String,
    /// Wall time of the run; informational, ignored by `replay`.
    pub wall_ms: u128,
    /// Truncated-curve warnings (hill runs); empty otherwise.
    pub warnings: Vec<String>,
    /// Bare output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

pub fn write_manifest(m: &RunManifest) -> String {
    let mut out = String::new();
    let kv = |out: &mut String, k: &str, v: &str| writeln!(out, "{k}={v}").unwrap();
    let kf = |out: &mut String, k: &str, v: f64| writeln!(out, "{k}={}", fmt_f64(v)).unwrap();

    kv(&mut out, "command", m.spec.name());
    kv(&mut out, "version", &m.version);
    match &m.spec {
        CommandSpec::Sweep {
            alpha,
            theta,
            q,
            a,
            nq,
            na,
            steps,
            prefix,
        } => {
            kf(&mut out, "alpha", *alpha);
            kf(&mut out, "theta", *theta);
            kf(&mut out, "q_min", q.0);
            kf(&mut out, "q_max", q.1);
            kf(&mut out, "a_min", a.0);
            kf(&mut out, "a_max", a.1);
            kv(&mut out, "nq", &nq.to_string());
            kv(&mut out, "na", &na.to_string());
            kv(&mut out, "steps_per_period", &steps.to_string());
            kv(&mut out, "method", "Rk4");
            kv(&mut out, "prefix", prefix);
        }
        CommandSpec::Boundaries {
            alpha,
            theta,
            q,
            points,
            decoupled,
            prefix,
        } => {
            kf(&mut out, "alpha", *alpha);
            kf(&mut out, "theta", *theta);
            kf(&mut out, "q_min", q.0);
            kf(&mut out, "q_max", q.1);
            kv(&mut out, "points", &points.to_string());
            kv(&mut out, "decoupled", if *decoupled { "true" } else { "false" });
            kv(&mut out, "prefix", prefix);
        }
        CommandSpec::Hill {
            alpha,
            theta,
            nu,
            order,
            bracket,
            q,
            points,
            prefix,
        } => {
            kf(&mut out, "alpha", *alpha);
            kf(&mut out, "theta", *theta);
            kv(&mut out, "nu", &nu.to_string());
            kv(&mut out, "order", &order.to_string());
            kf(&mut out, "bracket_min", bracket.0);
            kf(&mut out, "bracket_max", bracket.1);
            kf(&mut out, "q_min", q.0);
            kf(&mut out, "q_max", q.1);
            kv(&mut out, "points", &points.to_string());
            kv(&mut out, "prefix", prefix);
        }
        CommandSpec::Trace {
            alpha,
            theta,
            q,
            a,
            samples,
            steps,
            prefix,
        } => {
            kf(&mut out, "alpha", *alpha);
            kf(&mut out, "theta", *theta);
            kf(&mut out, "q", *q);
            kf(&mut out, "a_min", a.0);
            kf(&mut out, "a_max", a.1);
            kv(&mut out, "samples", &samples.to_string());
            kv(&mut out, "steps_per_period", &steps.to_string());
            kv(&mut out, "method", "Rk4");
            kv(&mut out, "prefix", prefix);
        }
    }
    kv(&mut out, "wall_ms", &m.wall_ms.to_string());
    for w in &m.warnings {
        kv(&mut out, "warning", w);
    }
    for o in &m.outputs {
        kv(&mut out, "output", o);
    }
    out
}

/// Key/value store for one parsed manifest: scalars must be unique,
/// `warning` and `output` repeat.
struct Fields {
    scalar: BTreeMap<String, String>,
    warnings: Vec<String>,
    outputs: Vec<String>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Result<String, String> {
        self.scalar
            .remove(key)
            .ok_or_else(|| format!("manifest is missing key {key:?}"))
    }

    fn take_f64(&mut self, key: &str) -> Result<f64, String> {
        let v = self.take(key)?;
        v.parse().map_err(|e| format!("bad {key} {v:?}: {e}"))
    }

    fn take_usize(&mut self, key: &str) -> Result<usize, String> {
        let v = self.take(key)?;
        v.parse().map_err(|e| format!("bad {key} {v:?}: {e}"))
    }
}

pub fn parse_manifest(text: &str) -> Result<RunManifest, String> {
    let mut fields = Fields {
        scalar: BTreeMap::new(),
        warnings: Vec::new(),
        outputs: Vec::new(),
    };
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("manifest line {}: expected key=value", n + 1))?;
        match key {
            "warning" => fields.warnings.push(value.to_string()),
            "output" => fields.outputs.push(value.to_string()),
            _ => {
                if fields
                    .scalar
                    .insert(key.to_string(), value.to_string())
                    .is_some()
                {
                    return Err(format!("manifest repeats key {key:?}"));
                }
            }
        }
    }

    let command = fields.take("command")?;
    let version = fields.take("version")?;
    let take_method = |f: &mut Fields| {
        let m = f.take("method")?;
        if m != "Rk4" {
            return Err(format!("unsupported method {m:?}"));
        }
        Ok(())
    };

    let spec = match command.as_str() {
        "sweep" => {
            let spec = CommandSpec::Sweep {
                alpha: fields.take_f64("alpha")?,
                theta: fields.take_f64("theta")?,
                q: (fields.take_f64("q_min")?, fields.take_f64("q_max")?),
                a: (fields.take_f64("a_min")?, fields.take_f64("a_max")?),
                nq: fields.take_usize("nq")?,
                na: fields.take_usize("na")?,
                steps: fields.take_usize("steps_per_period")?,
                prefix: fields.take("prefix")?,
            };
            take_method(&mut fields)?;
            spec
        }
        "boundaries" => CommandSpec::Boundaries {
            alpha: fields.take_f64("alpha")?,
            theta: fields.take_f64("theta")?,
            q: (fields.take_f64("q_min")?, fields.take_f64("q_max")?),
            points: fields.take_usize("points")?,
            decoupled: match fields.take("decoupled")?.as_str() {
                "true" => true,
                "false" => false,
                other => return Err(format!("bad decoupled {other:?}")),
            },
            prefix: fields.take("prefix")?,
        },
        "hill" => CommandSpec::Hill {
            alpha: fields.take_f64("alpha")?,
            theta: fields.take_f64("theta")?,
            nu: {
                let v = fields.take("nu")?;
                v.parse().map_err(|e| format!("bad nu {v:?}: {e}"))?
            },
            order: fields.take_usize("order")?,
            bracket: (
                fields.take_f64("bracket_min")?,
                fields.take_f64("bracket_max")?,
            ),
            q: (fields.take_f64("q_min")?, fields.take_f64("q_max")?),
            points: fields.take_usize("points")?,
            prefix: fields.take("prefix")?,
        },
        "trace" => {
            let spec = CommandSpec::Trace {
                alpha: fields.take_f64("alpha")?,
                theta: fields.take_f64("theta")?,
                q: fields.take_f64("q")?,
                a: (fields.take_f64("a_min")?, fields.take_f64("a_max")?),
                samples: fields.take_usize("samples")?,
                steps: fields.take_usize("steps_per_period")?,
                prefix: fields.take("prefix")?,
            };
            take_method(&mut fields)?;
            spec
        }
        other => return Err(format!("unknown command {other:?}")),
    };
    let wall_ms = {
        let v = fields.take("wall_ms")?;
        v.parse().map_err(|e| format!("bad wall_ms {v:?}: {e}"))?
    };
    if let Some(key) = fields.scalar.keys().next() {
        return Err(format!("unknown manifest key {key:?}"));
    }

    Ok(RunManifest {
        spec,
        version,
        wall_ms,
        warnings: fields.warnings,
        outputs: fields.outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        RunManifest {
            spec: CommandSpec::Sweep {
                alpha: 0.5,
                theta: 6.4,
                q: (0.0, 2.0),
                a: (-1.0, 1.5),
                nq: 40,
                na: 30,
                steps: 2048,
                prefix: "sweep".into(),
            },
            version: "0.1.0".into(),
            wall_ms: 1234,
            warnings: vec![],
            outputs: vec!["sweep_grid.csv".into(), "sweep_grid.pgm".into()],
        }
    }

    #[test]
    fn manifest_round_trips() {
        let m = sample();
        let parsed = parse_manifest(&write_manifest(&m)).unwrap();
        assert_eq!(parsed, m);
    }

    #[test]
    fn hill_manifest_keeps_warnings_in_order() {
        let m = RunManifest {
            spec: CommandSpec::Hill {
                alpha: 0.5,
                theta: 12.0,
                nu: 1,
                order: 20,
                bracket: (-1.0, 2.5),
                q: (0.0, 0.9),
                points: 50,
                prefix: "hill".into(),
            },
            version: "0.1.0".into(),
            wall_ms: 9,
            warnings: vec!["first".into(), "second".into()],
            outputs: vec!["hill_curves.csv".into()],
        };
        let parsed = parse_manifest(&write_manifest(&m)).unwrap();
        assert_eq!(parsed.warnings, vec!["first", "second"]);
        assert_eq!(parsed, m);
    }

    #[test]
    fn parser_rejects_damaged_manifests() {
        let text = write_manifest(&sample());
        assert!(parse_manifest(&text.replace("command=sweep", "command=paint")).is_err());
        assert!(parse_manifest(&text.replace("nq=40\n", "")).is_err());
        assert!(parse_manifest(&format!("{text}alpha=1e0\n")).is_err());
        assert!(parse_manifest(&format!("{text}mystery=1\n")).is_err());
        assert!(parse_manifest(&text.replace("method=Rk4", "method=Euler")).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# produced for a test\n\n{}", write_manifest(&sample()));
        assert_eq!(parse_manifest(&text).unwrap(), sample());
    }
}
