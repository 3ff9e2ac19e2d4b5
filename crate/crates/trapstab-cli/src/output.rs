//! File formats: CSV emitters with exact-round-trip float formatting, the
//! matching parsers, and the plain (P2) PGM raster.
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), which is
//! always enough to reproduce an f64 bit-for-bit, so parsing an emitted CSV
//! reconstructs the in-memory values exactly. All files use LF line endings
//! and are written atomically enough for our purposes (single writer).

use std::str::FromStr;

use trapstab::{BoundaryCurve, CurveMethod, EigenTrace, GridCell, StabilityGrid, StabilityLabel};

/// 17-significant-digit scientific notation; round-trips every finite f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, what: &str) -> Result<f64, String> {
    f64::from_str(field).map_err(|e| format!("bad {what} {field:?}: {e}"))
}

/// RFC-4180-style quoting: only fields containing a comma, quote, or line
/// break are quoted (labels may contain spaces, which need none).
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_unfield(s: &str) -> String {
    match s.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
        Some(inner) => inner.replace("\"\"", "\""),
        None => s.to_string(),
    }
}

/// One parsed grid-CSV record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRecord {
    pub q: f64,
    pub a: f64,
    pub cell: GridCell,
}

/// `q,a,class,unit_count` with one line per cell, column-major in q (the
/// in-memory cell order). Failed cells are written as `Error,-1`.
pub fn write_grid_csv(grid: &StabilityGrid) -> String {
    let mut out = String::from("q,a,class,unit_count\n");
    for i in 0..grid.spec.nq {
        for j in 0..grid.spec.na {
            let (q, a) = (grid.spec.q_center(i), grid.spec.a_center(j));
            let (class, count) = match grid.cell(i, j).class() {
                Some(c) => (c.label.to_string(), i64::from(c.unit_count)),
                None => ("Error".to_string(), -1),
            };
            out.push_str(&format!("{},{},{class},{count}\n", fmt_f64(q), fmt_f64(a)));
        }
    }
    out
}

/// Parses [`write_grid_csv`] output; exact inverse on the emitted values.
pub fn parse_grid_csv(text: &str) -> Result<Vec<GridRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty grid CSV")?;
    if header != "q,a,class,unit_count" {
        return Err(format!("unexpected grid CSV header {header:?}"));
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(format!("grid CSV line {}: expected 4 fields", n + 2));
        }
        let q = parse_f64(fields[0], "q")?;
        let a = parse_f64(fields[1], "a")?;
        let cell = if fields[2] == "Error" {
            if fields[3] != "-1" {
                return Err(format!("grid CSV line {}: Error rows carry -1", n + 2));
            }
            GridCell::Failed
        } else {
            let label: StabilityLabel = fields[2].parse()?;
            let unit_count: u8 = fields[3]
                .parse()
                .map_err(|e| format!("bad unit_count {:?}: {e}", fields[3]))?;
            GridCell::Classified(trapstab::StabilityClass { label, unit_count })
        };
        records.push(GridRecord { q, a, cell });
    }
    Ok(records)
}

/// One parsed curves-CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub label: String,
    pub method: CurveMethod,
    pub q: f64,
    pub a: f64,
}

/// `label,method,q,a`, curves in the given order, points in curve order.
pub fn write_curves_csv(curves: &[BoundaryCurve]) -> String {
    let mut out = String::from("label,method,q,a\n");
    for curve in curves {
        for &(q, a) in &curve.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&curve.label),
                curve.method,
                fmt_f64(q),
                fmt_f64(a)
            ));
        }
    }
    out
}

/// Parses [`write_curves_csv`] output; exact inverse on the emitted values.
pub fn parse_curves_csv(text: &str) -> Result<Vec<CurveRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty curves CSV")?;
    if header != "label,method,q,a" {
        return Err(format!("unexpected curves CSV header {header:?}"));
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        // Labels never contain commas (quoting is only defensive), so a
        // right-to-left split of the three trailing fields is exact.
        let mut fields = line.rsplitn(4, ',');
        let a = parse_f64(fields.next().unwrap(), "a")?;
        let q = fields
            .next()
            .ok_or_else(|| format!("curves CSV line {}: too few fields", n + 2))
            .and_then(|f| parse_f64(f, "q"))?;
        let method: CurveMethod = fields
            .next()
            .ok_or_else(|| format!("curves CSV line {}: too few fields", n + 2))?
            .parse()?;
        let label = csv_unfield(
            fields
                .next()
                .ok_or_else(|| format!("curves CSV line {}: too few fields", n + 2))?,
        );
        records.push(CurveRecord { label, method, q, a });
    }
    Ok(records)
}

/// `a,re1,im1,re2,im2,re3,im3,re4,im4,unit_count`: the four matched
/// multiplier trajectories at every uniform sample.
pub fn write_trace_csv(trace: &EigenTrace) -> String {
    let mut out = String::from("a,re1,im1,re2,im2,re3,im3,re4,im4,unit_count\n");
    for p in &trace.path {
        out.push_str(&fmt_f64(p.params.a));
        for v in p.spectrum.values {
            out.push_str(&format!(",{},{}", fmt_f64(v.re), fmt_f64(v.im)));
        }
        out.push_str(&format!(",{}\n", p.class.unit_count));
    }
    out
}

/// `a,loc_re,loc_im,on_real_axis`: every refined multiplier collision.
pub fn write_collisions_csv(trace: &EigenTrace) -> String {
    let mut out = String::from("a,loc_re,loc_im,on_real_axis\n");
    for c in &trace.collisions {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(c.a),
            fmt_f64(c.location.re),
            fmt_f64(c.location.im),
            c.on_real_axis
        ));
    }
    out
}

/// Gray level for each cell: black = fully stable through white = unstable,
/// with failed cells at a dark sentinel distinguishable from all four
/// classes.
pub fn pgm_level(cell: &GridCell) -> u8 {
    match cell.class().map(|c| c.label) {
        Some(StabilityLabel::FullyStable) => 0,
        Some(StabilityLabel::PartiallyStable) => 128,
        Some(StabilityLabel::Marginal) => 192,
        Some(StabilityLabel::Unstable) => 255,
        None => 64,
    }
}

/// Plain (P2) PGM raster of the grid: width `nq`, height `na`, top row at
/// `a_max` so the image is oriented like the (q, a) plane. Sample lines are
/// wrapped at 70 characters per the plain-PGM format.
pub fn write_grid_pgm(grid: &StabilityGrid) -> String {
    let spec = grid.spec;
    let mut out = format!("P2\n{} {}\n255\n", spec.nq, spec.na);
    let mut line = String::new();
    for j in (0..spec.na).rev() {
        for i in 0..spec.nq {
            let tok = pgm_level(grid.cell(i, j)).to_string();
            if !line.is_empty() && line.len() + 1 + tok.len() > 70 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&tok);
        }
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use trapstab::{sweep_grid, GridSpec, IntegratorConfig};

    fn tiny_grid() -> StabilityGrid {
        let spec = GridSpec {
            q_min: 0.0,
            q_max: 1.0,
            a_min: -0.5,
            a_max: 0.5,
            nq: 3,
            na: 2,
        };
        sweep_grid(0.5, 0.0, spec, IntegratorConfig::with_steps(256).unwrap()).unwrap()
    }

    #[test]
    fn float_format_round_trips_exactly() {
        for x in [
            0.0,
            -0.0,
            1.0,
            -1.5,
            0.1,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -2.2250738585072014e-308,
        ] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn grid_csv_round_trips_cells_and_centers() {
        let grid = tiny_grid();
        let text = write_grid_csv(&grid);
        let records = parse_grid_csv(&text).unwrap();
        assert_eq!(records.len(), 6);
        for (idx, r) in records.iter().enumerate() {
            let (i, j) = (idx / grid.spec.na, idx % grid.spec.na);
            assert_eq!(r.q.to_bits(), grid.spec.q_center(i).to_bits());
            assert_eq!(r.a.to_bits(), grid.spec.a_center(j).to_bits());
            assert_eq!(&r.cell, grid.cell(i, j));
        }
    }

    #[test]
    fn curves_csv_round_trips() {
        let curves = vec![
            BoundaryCurve {
                label: "hill nu=1 branch 0".into(),
                method: CurveMethod::Hill,
                points: vec![(0.0, 1.0), (0.1, 0.9)],
            },
            BoundaryCurve {
                label: "a0_lower".into(),
                method: CurveMethod::MultiScale,
                points: vec![(0.2, -0.02)],
            },
        ];
        let records = parse_curves_csv(&write_curves_csv(&curves)).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].label, "hill nu=1 branch 0");
        assert_eq!(records[0].method, CurveMethod::Hill);
        assert_eq!(records[2].q.to_bits(), 0.2f64.to_bits());
        assert_eq!(records[2].a.to_bits(), (-0.02f64).to_bits());
    }

    #[test]
    fn quoted_labels_survive_the_round_trip() {
        assert_eq!(csv_field("plain label"), "plain label");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_unfield(&csv_field("say \"hi\", twice")), "say \"hi\", twice");
    }

    #[test]
    fn pgm_is_plain_p2_with_bounded_lines() {
        let grid = tiny_grid();
        let text = write_grid_pgm(&grid);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("3 2"));
        assert_eq!(lines.next(), Some("255"));
        let samples: Vec<u32> = lines
            .flat_map(|l| l.split_whitespace())
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(samples.len(), 6);
        for line in text.lines() {
            assert!(line.len() <= 70, "line too long: {line:?}");
        }
        // Top-left sample is the (0, na-1) cell.
        assert_eq!(samples[0], u32::from(pgm_level(grid.cell(0, 1))));
    }

    #[test]
    fn palette_covers_all_cases() {
        use trapstab::StabilityClass;
        let mk = |label, unit_count| GridCell::Classified(StabilityClass { label, unit_count });
        assert_eq!(pgm_level(&mk(StabilityLabel::FullyStable, 4)), 0);
        assert_eq!(pgm_level(&mk(StabilityLabel::PartiallyStable, 2)), 128);
        assert_eq!(pgm_level(&mk(StabilityLabel::Marginal, 4)), 192);
        assert_eq!(pgm_level(&mk(StabilityLabel::Unstable, 0)), 255);
        assert_eq!(pgm_level(&GridCell::Failed), 64);
    }
}
