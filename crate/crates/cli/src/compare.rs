//! `compare`: pointwise difference of two field tables.

use crate::config::SliceLine;
use crate::table::{Cell, Table};
use crate::CliError;

/// Field coordinates and values of a solve table.
fn field(t: &Table) -> Result<(Vec<[f64; 2]>, Vec<f64>, bool), CliError> {
    let xs = t.column("x")?;
    let two_d = t.column_index("y").is_some();
    let ys = if two_d { t.column("y")? } else { vec![0.0; xs.len()] };
    let u = t.column("u")?;
    Ok((xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect(), u, two_d))
}

/// Linear interpolation of `(xs, u)` at `x`; `xs` ascending.
fn interp(xs: &[f64], u: &[f64], x: f64) -> Option<f64> {
    let j = xs.partition_point(|&v| v < x);
    if j < xs.len() && xs[j] == x {
        return Some(u[j]);
    }
    if j == 0 || j == xs.len() {
        return None;
    }
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    Some(u[j - 1] + t * (u[j] - u[j - 1]))
}

/// `u_A - u_B` at the points of `a`, optionally restricted to a slice.
///
/// Identical point sets are compared directly. Otherwise, for 1D fields or
/// slices (parameterized by `x`), `b` is resampled linearly onto `a` and the
/// output is flagged; points of `a` outside the range of `b` are dropped.
/// Anything else is an error.
pub fn compare(a: &Table, b: &Table, slice: Option<SliceLine>) -> Result<Table, CliError> {
    let (mut pa, mut ua, two_d) = field(a)?;
    let (mut pb, mut ub, two_d_b) = field(b)?;
    if two_d != two_d_b {
        return Err(CliError::Grid("cannot compare a 1D field with a 2D field".into()));
    }
    if let Some(line) = slice {
        if !two_d {
            return Err(CliError::Grid("slices apply to 2D fields only".into()));
        }
        let keep = |p: &[[f64; 2]], u: &[f64]| -> (Vec<[f64; 2]>, Vec<f64>) {
            p.iter().zip(u).filter(|(p, _)| line.contains(**p)).map(|(p, u)| (*p, *u)).unzip()
        };
        (pa, ua) = keep(&pa, &ua);
        (pb, ub) = keep(&pb, &ub);
    }
    let (pts, vb, resampled) = if pa == pb {
        (pa, ub, false)
    } else if !two_d || slice.is_some() {
        let mut order: Vec<usize> = (0..pb.len()).collect();
        order.sort_by(|&i, &j| pb[i][0].total_cmp(&pb[j][0]));
        let xs: Vec<f64> = order.iter().map(|&i| pb[i][0]).collect();
        let us: Vec<f64> = order.iter().map(|&i| ub[i]).collect();
        let mut pts = Vec::new();
        let mut vb = Vec::new();
        let mut kept_a = Vec::new();
        for (p, u) in pa.iter().zip(&ua) {
            if let Some(v) = interp(&xs, &us, p[0]) {
                pts.push(*p);
                vb.push(v);
                kept_a.push(*u);
            }
        }
        ua = kept_a;
        (pts, vb, true)
    } else {
        return Err(CliError::Grid("the runs use different 2D grids; rerun on a shared grid or compare along a slice".into()));
    };
    if pts.is_empty() {
        return Err(CliError::Grid("the grids do not overlap".into()));
    }
    let mut t = if two_d { Table::new(&["x", "y", "u_a", "u_b", "diff"]) } else { Table::new(&["x", "u_a", "u_b", "diff"]) };
    for key in ["case", "solver", "alpha"] {
        t.meta(&format!("a_{key}"), a.get_meta(key).unwrap_or("?"));
        t.meta(&format!("b_{key}"), b.get_meta(key).unwrap_or("?"));
    }
    if resampled {
        t.meta("resampled", "b linearly interpolated onto the points of a");
    }
    let (mut max, mut arg, mut sq) = (0.0f64, pts[0], 0.0);
    for ((p, &va), &vb) in pts.iter().zip(&ua).zip(&vb) {
        let d = va - vb;
        if d.abs() > max {
            max = d.abs();
            arg = *p;
        }
        sq += d * d;
        let mut row: Vec<Cell> = vec![p[0].into()];
        if two_d {
            row.push(p[1].into());
        }
        row.extend([va.into(), vb.into(), d.into()]);
        t.push(row);
    }
    let min_diff = t.column("diff")?.into_iter().fold(f64::INFINITY, f64::min);
    t.meta("max_abs_diff", format!("{max:.16e}"))
        .meta("rms_diff", format!("{:.16e}", (sq / pts.len() as f64).sqrt()))
        .meta("min_diff", format!("{min_diff:.16e}"))
        .meta("argmax", if two_d { format!("{} {}", arg[0], arg[1]) } else { arg[0].to_string() });
    Ok(t)
}
