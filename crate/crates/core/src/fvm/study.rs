//! Grid-refinement and horizon studies.

use super::{solve_problem, FVSolution};
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::order::FracOrder;
use crate::par::{map_range, Execution};
use crate::stats::loglog_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L2,
    Linf,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::L2 => "L2",
            Norm::Linf => "Linf",
        }
    }

    fn of(self, e: &[f64], h: f64) -> f64 {
        match self {
            Norm::L2 => (h * e.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Norm::Linf => e.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub error: f64,
    /// Order against the previous (coarser) row.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub alpha: f64,
    pub delta: f64,
    pub norm: Norm,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares log-log slope of error against `h`.
    pub fitted_order: f64,
}

/// Averages a fine solution onto `n` coarse cells.
fn restrict(fine: &[f64], n: usize) -> Result<Vec<f64>> {
    if fine.len() % n != 0 {
        return Err(FracError::InvalidParameter(format!(
            "{} reference cells do not nest {n} coarse cells",
            fine.len()
        )));
    }
    let r = fine.len() / n;
    Ok(fine.chunks(r).map(|c| c.iter().sum::<f64>() / r as f64).collect())
}

/// Errors of each grid against the finest one, which serves as reference.
pub fn convergence_study(
    alpha: FracOrder,
    l_half: f64,
    delta: f64,
    ns: &[usize],
    f: &ScalarField,
    norms: &[Norm],
    exec: Execution,
) -> Result<Vec<StudyTable>> {
    if ns.len() < 3 {
        return Err(FracError::InvalidParameter("a convergence study needs at least three grids".into()));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let sols: Vec<Result<FVSolution>> = map_range(exec, ns.len(), |i| solve_problem(alpha, l_half, ns[i], delta, f));
    let sols: Vec<FVSolution> = sols.into_iter().collect::<Result<_>>()?;
    let reference = sols.last().expect("non-empty");
    let mut tables = Vec::new();
    for &norm in norms {
        let mut rows: Vec<ConvergenceRow> = Vec::new();
        for s in &sols[..sols.len() - 1] {
            let coarse = restrict(&reference.averages, s.grid.n)?;
            let e: Vec<f64> = s.averages.iter().zip(&coarse).map(|(a, b)| a - b).collect();
            let error = norm.of(&e, s.grid.h);
            let observed_order = rows.last().map(|p| (p.error / error).ln() / (p.h / s.grid.h).ln());
            rows.push(ConvergenceRow { n: s.grid.n, h: s.grid.h, error, observed_order });
        }
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let es: Vec<f64> = rows.iter().map(|r| r.error).collect();
        tables.push(StudyTable { alpha: alpha.value(), delta, norm, fitted_order: loglog_slope(&hs, &es), rows });
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonRow {
    pub delta: f64,
    /// `max_j |ū_j^Riesz - ū_j^δ|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonStudy {
    pub alpha: f64,
    pub n: usize,
    pub rows: Vec<HorizonRow>,
    /// Log-log slope of the error against `δ`.
    pub slope: f64,
}

/// Distance between horizon solutions and the Riesz-mode solution on one grid.
pub fn horizon_study(
    alpha: FracOrder,
    l_half: f64,
    n: usize,
    deltas: &[f64],
    f: &ScalarField,
    exec: Execution,
) -> Result<HorizonStudy> {
    if deltas.len() < 2 {
        return Err(FracError::InvalidParameter("a horizon study needs at least two horizons".into()));
    }
    let riesz = solve_problem(alpha, l_half, n, f64::INFINITY, f)?;
    let sols: Vec<Result<FVSolution>> = map_range(exec, deltas.len(), |i| solve_problem(alpha, l_half, n, deltas[i], f));
    let mut rows = Vec::new();
    for s in sols {
        let s = s?;
        let error = s.averages.iter().zip(&riesz.averages).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        rows.push(HorizonRow { delta: s.grid.delta, error });
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.error).collect();
    Ok(HorizonStudy { alpha: alpha.value(), n, slope: loglog_slope(&ds, &es), rows })
}
