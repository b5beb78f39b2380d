//! `solve`: one solver on one case, evaluated on a grid.

use crate::cases::{Case, CaseRegistry};
use crate::config::{Params, RunConfig, SolverKind};
use crate::table::{Cell, Table, WALL_TIME_KEY};
use crate::CliError;
use fraclap::fvm;
use fraclap::rbf::RbfSetup;
use fraclap::spectral::{
    self, harmonic_lift, heat::heat_multiplier, heat::time_rule, EigenBasis, HeatSGConfig, Propagation, SpectralCoeffs,
    SpectralSolution,
};
use fraclap::wos::{WalkConfig, WosSolver};
use fraclap::{DiffField, Domain, Execution, FracOrder, Point, TriMesh};
use std::sync::Arc;
use std::time::Instant;

/// Parameters each solver understands.
pub fn known_params(kind: SolverKind) -> &'static [&'static str] {
    match kind {
        SolverKind::Spectral => &["K", "basis", "cells", "mesh"],
        SolverKind::SpectralLift => &["K", "basis", "cells", "mesh", "v"],
        SolverKind::SpectralHeatsg => &["K", "basis", "cells", "mesh", "T", "nt", "dt"],
        SolverKind::Wos => &["paths", "occupation", "max_steps"],
        SolverKind::Rbf => &["n", "h", "K2", "c", "P"],
        SolverKind::Fvm => &["N", "delta", "backend"],
    }
}

/// Per-point output of a solver.
struct Values {
    u: Vec<f64>,
    /// WOS only: `(stderr, paths, mean_steps)`.
    mc: Option<Vec<(f64, usize, f64)>>,
    notes: Vec<(String, String)>,
}

fn order(alpha: f64) -> Result<Option<FracOrder>, CliError> {
    if alpha == 2.0 {
        Ok(None)
    } else {
        Ok(Some(FracOrder::new(alpha)?))
    }
}

/// Runs `cfg` and returns the field table. Points outside the open domain
/// report the data `g`.
pub fn run(cfg: &RunConfig, registry: &CaseRegistry) -> Result<Table, CliError> {
    let start = Instant::now();
    let case = registry.get(&cfg.case)?;
    let alpha = cfg.alpha.unwrap_or(case.default_alpha);
    case.check_alpha(alpha)?;
    cfg.solver.check_applicable(case, alpha)?;
    let params = cfg.params();
    params.check_known(known_params(cfg.solver))?;
    let points = cfg.grid.points(&case.domain)?;
    let inside: Vec<bool> = points.iter().map(|&p| case.domain.contains_strict(p)).collect();
    let interior: Vec<Point> = points.iter().zip(&inside).filter(|(_, &i)| i).map(|(p, _)| *p).collect();
    let values = match cfg.solver {
        SolverKind::Spectral | SolverKind::SpectralLift | SolverKind::SpectralHeatsg => spectral_values(cfg.solver, case, alpha, params, &interior)?,
        SolverKind::Wos => wos_values(case, alpha, cfg.seed, params, &interior)?,
        SolverKind::Rbf => rbf_values(case, alpha, params, &interior)?,
        SolverKind::Fvm => fvm_values(case, alpha, params, &interior)?,
    };
    let mut table = if case.dim() == 1 { Table::new(&["x", "u"]) } else { Table::new(&["x", "y", "u"]) };
    if values.mc.is_some() {
        table.columns.extend(["stderr", "paths", "mean_steps"].map(String::from));
    }
    table.meta("case", &case.name).meta("solver", cfg.solver.name()).meta("alpha", alpha).meta("seed", cfg.seed);
    table.meta("params", params.render()).meta("grid", serde_json::to_string(&cfg.grid).expect("grid serializes"));
    for (k, v) in &values.notes {
        table.meta(k, v);
    }
    let mut k = 0;
    for (&p, &is_in) in points.iter().zip(&inside) {
        let mut row: Vec<Cell> = if case.dim() == 1 { vec![p[0].into()] } else { vec![p[0].into(), p[1].into()] };
        if is_in {
            row.push(values.u[k].into());
            if let Some(mc) = &values.mc {
                let (se, n, steps) = mc[k];
                row.extend([se.into(), n.into(), steps.into()]);
            }
            k += 1;
        } else {
            row.push(case.g.eval(p).into());
            if values.mc.is_some() {
                row.extend([0.0.into(), 0usize.into(), 0.0.into()]);
            }
        }
        table.push(row);
    }
    table.meta(WALL_TIME_KEY, format!("{:.3}", start.elapsed().as_secs_f64()));
    Ok(table)
}

/// The eigenbasis a spectral run uses.
pub fn spectral_basis(case: &Case, params: Params<'_>) -> Result<Arc<EigenBasis>, CliError> {
    let kind = params.str_or("basis", "analytic");
    let basis = match (kind.as_str(), &case.domain) {
        (_, Domain::LShape) | ("mesh", Domain::Rectangle { .. }) => {
            let n = params.usize_or("mesh", 16)?;
            let mesh = match case.domain {
                Domain::LShape => TriMesh::lshape(n)?,
                _ => {
                    let (lo, hi) = case.domain.bounding_box();
                    TriMesh::rectangle(lo, hi, 2 * n, 2 * n)?
                }
            };
            let k = params.usize_or("K", mesh.interior_vertices().len())?;
            EigenBasis::fem(Arc::new(mesh), k)?
        }
        ("mesh", Domain::Interval { .. }) => {
            let cells = params.usize_or("cells", 256)?;
            let k = params.usize_or("K", cells - 1)?;
            EigenBasis::fem_interval(&case.domain, cells, Some(k))?
        }
        ("analytic", dom) => {
            let default_k = if dom.dim() == 1 { 64 } else { 400 };
            EigenBasis::analytic(dom, params.usize_or("K", default_k)?)?
        }
        (other, dom) => return Err(CliError::Config(format!("no {other:?} basis for the {}", dom.name()))),
    };
    Ok(Arc::new(basis))
}

/// Lifting for `spectral-lift`: the case's smooth extension of `g`, or for
/// one-dimensional data `v = x` / `v = x^3` when `v` is given.
fn lifting(case: &Case, params: Params<'_>) -> Result<DiffField, CliError> {
    match params.str_or("v", "case").as_str() {
        "case" => Ok(case.lift.clone().unwrap_or_else(|| DiffField::new(|_| 0.0, |_| [0.0, 0.0]))),
        "x" => Ok(DiffField::new(|p| p[0], |_| [1.0, 0.0])),
        "x3" => Ok(DiffField::new(|p| p[0].powi(3), |p| [3.0 * p[0] * p[0], 0.0])),
        v => Err(CliError::Config(format!("unknown lifting {v:?}; use case, x or x3"))),
    }
}

fn spectral_values(kind: SolverKind, case: &Case, alpha: f64, params: Params<'_>, pts: &[Point]) -> Result<Values, CliError> {
    let basis = spectral_basis(case, params)?;
    let mut notes = vec![("modes".to_string(), basis.len().to_string())];
    let sol: SpectralSolution = match kind {
        SolverKind::Spectral => spectral::solve_inhomogeneous_lifting(&case.f, &case.g, &basis, alpha)?,
        SolverKind::SpectralLift => spectral::solve_inhomogeneous_nonharmonic(&case.f, &case.g, &lifting(case, params)?, &basis, alpha)?,
        _ => {
            let Some(a) = order(alpha)? else {
                return Err(CliError::Incompatible("the heat semigroup needs alpha < 2".into()));
            };
            let l1 = basis.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
            let lmax = basis.eigenvalues().iter().copied().fold(0.0, f64::max);
            let mut hc = HeatSGConfig::new(params.f64_or("T", 28.0 / l1 + 1.0)?, params.usize_or("nt", 400)?)?;
            if let Some(dt) = params.0.get("dt").map(|_| params.f64_or("dt", 0.0)).transpose()? {
                hc = hc.with_euler(dt)?;
            }
            let rule = time_rule(a, &hc, lmax)?;
            let fk = basis.project(&case.f);
            let coeffs = fk.iter().zip(basis.eigenvalues()).map(|(f, &l)| f / heat_multiplier(l, &rule, hc.propagation)).collect();
            if let Propagation::ForwardEuler { dt } = hc.propagation {
                notes.push(("euler_dt".into(), dt.to_string()));
            }
            notes.push(("T".into(), hc.t_final.to_string()));
            SpectralSolution { coeffs: SpectralCoeffs { basis: basis.clone(), coeffs }, lift: harmonic_lift(&case.g, basis.domain())? }
        }
    };
    Ok(Values { u: sol.eval_many(pts, Execution::Parallel), mc: None, notes })
}

fn wos_values(case: &Case, alpha: f64, seed: u64, params: Params<'_>, pts: &[Point]) -> Result<Values, CliError> {
    let mut cfg = WalkConfig::new(FracOrder::new(alpha)?, params.usize_or("paths", 10_000)?, seed);
    cfg.occupation_samples = params.usize_or("occupation", 1)?;
    cfg.max_steps = params.usize_or("max_steps", cfg.max_steps)?;
    let mut solver = WosSolver::new(case.domain.clone(), cfg)?;
    let (mut u, mut mc) = (Vec::new(), Vec::new());
    let mut discarded = 0;
    for (i, &p) in pts.iter().enumerate() {
        // independent streams per point
        solver.config.seed = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let e = solver.solve(p, &case.f, &case.g)?;
        discarded += e.discarded;
        u.push(e.mean);
        mc.push((e.stderr, e.num_paths, e.mean_steps));
    }
    Ok(Values { u, mc: Some(mc), notes: vec![("discarded_paths".into(), discarded.to_string())] })
}

/// The collocation setup for a case, from `n`, `h`, `K2`, `c`, `P`.
pub fn rbf_setup(case: &Case, alpha: f64, params: Params<'_>) -> Result<RbfSetup, CliError> {
    let a = FracOrder::new(alpha)?;
    let h = params.f64_or("h", 1e-3)?;
    let k2 = params.usize_or("K2", if case.zero_data() { 1 } else { 6000 })?;
    let mut s = match &case.domain {
        Domain::Disk { .. } => RbfSetup::disk(params.usize_or("n", 19)?, a, h, k2)?,
        Domain::Rectangle { .. } => RbfSetup::square(params.usize_or("n", 21)?, a, h, k2)?,
        Domain::LShape => RbfSetup::lshape(params.usize_or("n", 21)?, a, h, k2)?,
        Domain::Interval { half, .. } => RbfSetup::interval(params.usize_or("n", 41)?, *half, a, h, k2)?,
        Domain::TriMesh(_) => return Err(CliError::Incompatible("no collocation preset for a mesh domain".into())),
    };
    if let Some(c) = params.0.get("c").map(|_| params.f64_or("c", 0.0)).transpose()? {
        s.rbf = fraclap::rbf::MultiquadricRBF::new(c)?;
    }
    if let Some(p) = params.0.get("P").map(|_| params.usize_or("P", 16)).transpose()? {
        if case.dim() == 2 {
            s.op.quad = fraclap::rbf::DirQuadrature::gauss_legendre(p)?;
        }
    }
    Ok(s)
}

fn rbf_values(case: &Case, alpha: f64, params: Params<'_>, pts: &[Point]) -> Result<Values, CliError> {
    let setup = rbf_setup(case, alpha, params)?;
    let sol = setup.solve(&case.f, &case.g, Execution::Parallel)?;
    let notes = vec![
        ("collocation_points".into(), setup.colloc.len().to_string()),
        ("condition_estimate".into(), format!("{:.6e}", sol.condition)),
        ("relative_residual".into(), format!("{:.6e}", sol.residual)),
    ];
    Ok(Values { u: sol.evaluate(pts), mc: None, notes })
}

fn fvm_values(case: &Case, alpha: f64, params: Params<'_>, pts: &[Point]) -> Result<Values, CliError> {
    let Domain::Interval { half, .. } = case.domain else { unreachable!("checked by check_applicable") };
    let n = params.usize_or("N", 1 << 12)?;
    let delta = match params.str_or("delta", "inf").as_str() {
        "inf" | "riesz" => f64::INFINITY,
        _ => params.f64_or("delta", f64::INFINITY)?,
    };
    let backend = match params.str_or("backend", "fast").as_str() {
        "fast" => fvm::Backend::Fast,
        "direct" => fvm::Backend::Direct,
        b => return Err(CliError::Config(format!("unknown backend {b:?}; use fast or direct"))),
    };
    let grid = fvm::FVGrid::new(half, n, delta)?;
    let s = fvm::assemble(&grid, FracOrder::new(alpha)?, grid.is_riesz())?;
    let sol = fvm::solve(&s, &case.f, &grid, backend)?;
    let mut notes = vec![("cells".to_string(), n.to_string()), ("delta".to_string(), grid.delta.to_string())];
    notes.extend(sol.warnings.iter().map(|w| ("warning".to_string(), w.clone())));
    Ok(Values { u: pts.iter().map(|p| sol.eval(p[0])).collect(), mc: None, notes })
}
