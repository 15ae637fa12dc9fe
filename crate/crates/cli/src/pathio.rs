//! Deterministic CSV readers and writers.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a value
//! re-read from a file is bit-identical to the value written and two runs with
//! equal inputs produce byte-identical files.
//!
//! Path files carry a `kind` line, a column header, and one row per knot:
//!
//! ```text
//! kind,step
//! t,x
//! 0,0
//! 0.5,1
//! 1,1
//! ```
//!
//! Step and continuous paths store the right-continuous value per component;
//! the left limits are implied. A discontinuous piecewise-linear path (jumps
//! plus slopes) is not determined by its values at knots alone, so such paths
//! store explicit `<name>_left,<name>_right` column pairs instead.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use heavylimits::path::{CadlagPath, PathKind};
use heavylimits::Path64;

use crate::error::CliError;

fn kind_name(kind: PathKind) -> &'static str {
    match kind {
        PathKind::Step => "step",
        PathKind::PiecewiseLinear => "piecewise-linear",
    }
}

fn write_file(path: &Path, body: String) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::io(path, e))
}

/// Raw series sample, one row per observation.
pub fn write_series_csv(path: &Path, xs: &[f64]) -> Result<(), CliError> {
    let mut body = String::from("index,value\n");
    for (i, x) in xs.iter().enumerate() {
        let _ = writeln!(body, "{},{x}", i + 1);
    }
    write_file(path, body)
}

/// One cadlag path with named components.
pub fn write_path_csv(path: &Path, p: &Path64, names: &[&str]) -> Result<(), CliError> {
    assert_eq!(names.len(), p.dim(), "one column name per component");
    // Right values at knots determine step paths (left limits are the
    // previous value) and continuous paths (left limits coincide); only
    // discontinuous piecewise-linear paths need both sides.
    let single = p.kind() == PathKind::Step || p.is_continuous();
    let mut body = format!("kind,{}\n", kind_name(p.kind()));
    body.push('t');
    for name in names {
        if single {
            let _ = write!(body, ",{name}");
        } else {
            let _ = write!(body, ",{name}_left,{name}_right");
        }
    }
    body.push('\n');
    for (i, t) in p.knots().iter().enumerate() {
        let _ = write!(body, "{t}");
        for d in 0..p.dim() {
            if single {
                let _ = write!(body, ",{}", p.right_at_knot(d, i));
            } else {
                let _ = write!(body, ",{},{}", p.left_at_knot(d, i), p.right_at_knot(d, i));
            }
        }
        body.push('\n');
    }
    write_file(path, body)
}

/// Joins the two components of a limit pair on their merged knot set.
pub fn joint_path(v: &Path64, w: &Path64) -> Result<Path64, CliError> {
    let mut knots: Vec<f64> = v.knots().iter().chain(w.knots()).copied().collect();
    knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
    knots.dedup();
    let comps = [v, w]
        .iter()
        .map(|p| {
            let mut left = Vec::with_capacity(knots.len());
            let mut right = Vec::with_capacity(knots.len());
            for (i, t) in knots.iter().enumerate() {
                left.push(if i == 0 { p.eval(0, *t) } else { p.left_limit(0, *t) });
                right.push(p.eval(0, *t));
            }
            (left, right)
        })
        .collect();
    CadlagPath::new(knots, comps).map_err(|e| CliError::Run(e.to_string()))
}

/// Paired finite-side and limit-side samples of one functional.
pub fn write_samples_csv(path: &Path, finite: &[f64], limit: &[f64]) -> Result<(), CliError> {
    assert_eq!(finite.len(), limit.len(), "sample sides have equal replicates");
    let mut body = String::from("finite,limit\n");
    for (f, l) in finite.iter().zip(limit) {
        let _ = writeln!(body, "{f},{l}");
    }
    write_file(path, body)
}

/// Reads a path file written by [`write_path_csv`] (or by hand in the same
/// dialect). Structural problems map to the config exit code.
pub fn read_path_csv(path: &Path) -> Result<Path64, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    let kind_line = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let kind = match kind_line.trim() {
        "kind,step" => PathKind::Step,
        "kind,piecewise-linear" => PathKind::PiecewiseLinear,
        other => return Err(bad(format!("expected a kind line, got {other:?}"))),
    };
    let header = lines.next().ok_or_else(|| bad("missing column header".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.first() != Some(&"t") || columns.len() < 2 {
        return Err(bad(format!("expected header t,<name>,..., got {header:?}")));
    }
    let value_cols = &columns[1..];
    // `<name>_left,<name>_right` pairs carry both one-sided values; plain
    // names carry the right value only.
    let paired = value_cols.len().is_multiple_of(2)
        && value_cols
            .chunks(2)
            .all(|c| c[0].ends_with("_left") && c[1].ends_with("_right"));
    let dim = if paired { value_cols.len() / 2 } else { value_cols.len() };

    let mut knots = Vec::new();
    let mut cells = vec![Vec::new(); value_cols.len()];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != value_cols.len() + 1 {
            return Err(bad(format!(
                "row {}: expected {} fields",
                lineno + 3,
                value_cols.len() + 1
            )));
        }
        let mut nums = fields.iter().map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("row {}: bad number {f:?}", lineno + 3)))
        });
        knots.push(nums.next().expect("at least two columns")?);
        for col in cells.iter_mut() {
            col.push(nums.next().expect("checked length")?);
        }
    }

    let built = if paired {
        let comps = cells
            .chunks(2)
            .map(|pair| (pair[0].clone(), pair[1].clone()))
            .collect();
        CadlagPath::new(knots, comps)
    } else {
        match kind {
            PathKind::Step => CadlagPath::step(knots, cells),
            PathKind::PiecewiseLinear => CadlagPath::piecewise_linear(knots, cells),
        }
    };
    let p = built.map_err(|e| bad(e.to_string()))?;
    if p.kind() != kind {
        return Err(bad(format!(
            "kind line says {:?} but the values describe a {:?} path",
            kind_name(kind),
            kind_name(p.kind())
        )));
    }
    if p.dim() != dim {
        return Err(bad("component count mismatch".into()));
    }
    Ok(p)
}
