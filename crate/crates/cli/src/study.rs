//! Comparison and convergence studies, each producing one table.

use crate::config::Params;
use crate::table::{Cell, Table};
use crate::CliError;
use fraclap::fvm::{convergence_study, horizon_study, Norm};
use fraclap::par::map_range;
use fraclap::rbf::{
    assemble, assemble_rhs, generate_disk_points, DirQuadrature, DirectionalGL, FactoredSystem, GLScheme, RbfSetup,
};
use fraclap::reference::{dyda_pair, DydaVariant, PoissonKernel};
use fraclap::spectral::{
    apply_fraclap_heatsg, apply_fraclap_inhomogeneous, solve_homogeneous, solve_inhomogeneous_lifting,
    solve_inhomogeneous_nonharmonic, EigenBasis, HeatSGConfig,
};
use fraclap::stats::loglog_slope;
use fraclap::wos::{WalkConfig, WosSolver};
use fraclap::{DiffField, Domain, Execution, FracOrder, Point, ScalarField};
use std::f64::consts::PI;
use std::sync::Arc;

pub const STUDIES: [&str; 8] = [
    "monotonicity",
    "horizon",
    "fvm-convergence",
    "gl-convergence",
    "lifting-equivalence",
    "heatsg-equivalence",
    "rbf-vs-wos",
    "rbf-truncation",
];

/// Runs a study by name with `key=value` parameters.
pub fn study(name: &str, p: Params<'_>, exec: Execution) -> Result<Table, CliError> {
    let known: &[&str] = match name {
        "monotonicity" => &["L", "alphas", "n_alpha", "K"],
        "horizon" => &["alpha", "L", "N", "deltas"],
        "fvm-convergence" => &["alphas", "L", "delta", "N"],
        "gl-convergence" => &["alphas", "h", "I"],
        "lifting-equivalence" => &["alphas", "cells"],
        "heatsg-equivalence" => &["alpha", "K", "nt", "dt", "grid"],
        "rbf-vs-wos" => &["alpha", "I", "h", "K2", "paths", "samples", "seed"],
        "rbf-truncation" => &["alpha", "n", "h", "K2"],
        _ => return Err(CliError::Config(format!("unknown study {name:?}; one of {}", STUDIES.join(", ")))),
    };
    p.check_known(known)?;
    let ints = |key: &str, default: &[f64]| -> Result<Vec<usize>, CliError> {
        p.list_or(key, default)?
            .into_iter()
            .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(CliError::Config(format!("{key} must hold positive integers"))) })
            .collect()
    };
    let mut t = match name {
        "monotonicity" => {
            let n = p.usize_or("n_alpha", 40)?;
            let grid: Vec<f64> = (0..n).map(|i| 0.05 + 1.9 * i as f64 / (n.max(2) - 1) as f64).collect();
            monotonicity(&p.list_or("L", &[0.5, 1.0, 2.0, 5.0])?, &p.list_or("alphas", &grid)?, p.usize_or("K", 256)?, exec)?
        }
        "horizon" => horizon(
            p.f64_or("alpha", 1.5)?,
            p.f64_or("L", 1.0)?,
            p.usize_or("N", 1 << 14)?,
            &p.list_or("deltas", &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0])?,
            exec,
        )?,
        "fvm-convergence" => {
            let l = p.f64_or("L", 1.0)?;
            // horizon defaults to the diameter; "inf" selects the Riesz limit
            fvm_convergence(&p.list_or("alphas", &[0.5, 1.5])?, l, p.f64_or("delta", 2.0 * l)?,
&ints("N", &[256.0, 512.0, 1024.0, 2048.0, 32768.0])?, exec)?
        }
        "gl-convergence" => gl_convergence(&p.list_or("alphas", &[0.5, 1.5])?, &p.list_or("h", &[4e-3, 2e-3, 1e-3])?, p.usize_or("I", 39)?, exec)?,
        "lifting-equivalence" => lifting_equivalence(&p.list_or("alphas", &[0.2, 0.5, 1.0, 1.5, 1.9])?, p.usize_or("cells", 256)?)?,
        "heatsg-equivalence" => heatsg_equivalence(
            p.f64_or("alpha", 1.5)?,
            p.usize_or("K", 100)?,
            p.usize_or("nt", 400)?,
            &p.list_or("dt", &[1e-3, 5e-4, 2.5e-4, 1.25e-4])?,
            p.usize_or("grid", 21)?,
        )?,
        "rbf-vs-wos" => {
            let probes = default_probes();
            rbf_vs_wos(
                &RbfVsWos {
                    alpha: p.f64_or("alpha", 1.5)?,
                    i: p.usize_or("I", 19)?,
                    h: p.f64_or("h", 2e-3)?,
                    k2: p.usize_or("K2", 3000)?,
                    paths: p.usize_or("paths", 10_000)?,
                    kernel_samples: p.usize_or("samples", 100_000)?,
                    seed: p.usize_or("seed", 1)? as u64,
                },
                &probes,
                exec,
            )?
        }
        _ => rbf_truncation(
            p.f64_or("alpha", 1.5)?,
            p.usize_or("n", 41)?,
            p.f64_or("h", 1e-3)?,
            &ints("K2", &[1000.0, 1200.0, 1600.0, 2000.0, 3000.0, 4000.0, 6000.0])?,
            exec,
        )?,
    };
    t.meta.insert(0, ("study".into(), name.into()));
    t.meta.insert(1, ("params".into(), p.render()));
    Ok(t)
}

/// Ten probes in the unit disk at several radii and angles.
pub fn default_probes() -> Vec<Point> {
    [(0.0, 0.0), (0.2, 0.3), (0.35, 1.9), (0.5, 0.0), (0.5, 3.6), (0.65, 2.4), (0.75, 5.1), (0.85, 1.0), (0.9, 4.2), (0.95, 0.6)]
        .iter()
        .map(|&(r, t): &(f64, f64)| [r * t.cos(), r * t.sin()])
        .collect()
}

/// `M_L(α) = max u_L` for `f = 1` on `(-L, L)` with the spectral operator,
/// and its ratio to `L^α M_1(α)`.
pub fn monotonicity(ls: &[f64], alphas: &[f64], k: usize, exec: Execution) -> Result<Table, CliError> {
    let one = ScalarField::interior(|_| 1.0);
    // relative sample points, so every L sees the same scaled locations
    let ts: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
    let max_for = |l: f64, a: f64| -> Result<f64, CliError> {
        let basis = Arc::new(EigenBasis::interval(l, k)?);
        let u = solve_homogeneous(&one, &basis, FracOrder::new(a)?);
        Ok(ts.iter().map(|&t| u.eval([l * t, 0.0])).fold(f64::NEG_INFINITY, f64::max))
    };
    let jobs: Vec<(f64, f64)> = ls.iter().flat_map(|&l| alphas.iter().map(move |&a| (l, a))).collect();
    let m: Vec<Result<f64, CliError>> = map_range(exec, jobs.len(), |i| max_for(jobs[i].0, jobs[i].1));
    let m1: Vec<Result<f64, CliError>> = map_range(exec, alphas.len(), |i| max_for(1.0, alphas[i]));
    let m1: Vec<f64> = m1.into_iter().collect::<Result<_, _>>()?;
    let mut t = Table::new(&["L", "alpha", "max_u", "scaling_ratio"]);
    let mut worst = 0.0f64;
    for ((l, a), m) in jobs.iter().zip(m) {
        let m = m?;
        let j = alphas.iter().position(|x| x == a).expect("alpha from the list");
        let ratio = m / (l.powf(*a) * m1[j]);
        worst = worst.max((ratio - 1.0).abs());
        t.push(vec![(*l).into(), (*a).into(), m.into(), ratio.into()]);
    }
    for &l in ls {
        let col: Vec<f64> = t.rows.iter().filter(|r| r[0] == Cell::Num(l)).map(|r| r[2].as_f64().expect("numeric")).collect();
        let inc = col.windows(2).all(|w| w[1] >= w[0]);
        let dec = col.windows(2).all(|w| w[1] <= w[0]);
        t.meta(&format!("trend_L{l}"), if inc { "increasing" } else if dec { "decreasing" } else { "non-monotone" });
    }
    t.meta("max_scaling_deviation", format!("{worst:.3e}"));
    Ok(t)
}

const FVM_COLUMNS: [&str; 7] = ["alpha", "delta_or_inf", "N", "h", "norm", "error", "observed_order"];

fn delta_cell(d: f64) -> Cell {
    if d.is_finite() { d.into() } else { "inf".into() }
}

/// `‖u_Riesz - u_δ‖_∞` against `δ = factor · L`.
pub fn horizon(alpha: f64, l: f64, n: usize, factors: &[f64], exec: Execution) -> Result<Table, CliError> {
    let deltas: Vec<f64> = factors.iter().map(|f| f * l).collect();
    let s = horizon_study(FracOrder::new(alpha)?, l, n, &deltas, &ScalarField::interior(|_| 1.0), exec)?;
    let mut t = Table::new(&FVM_COLUMNS);
    let h = 2.0 * l / n as f64;
    let mut prev: Option<(f64, f64)> = None;
    for r in &s.rows {
        let order = prev.map(|(d, e)| (r.error / e).ln() / (r.delta / d).ln());
        t.push(vec![alpha.into(), delta_cell(r.delta), n.into(), h.into(), "Linf".into(), r.error.into(), order.into()]);
        prev = Some((r.delta, r.error));
    }
    t.meta("fitted_slope", format!("{:.6}", s.slope));
    Ok(t)
}

/// Grid refinement against the finest grid in `ns`.
pub fn fvm_convergence(alphas: &[f64], l: f64, delta: f64, ns: &[usize], exec: Execution) -> Result<Table, CliError> {
    let mut t = Table::new(&FVM_COLUMNS);
    let f = ScalarField::interior(|_| 1.0);
    for &a in alphas {
        for tab in convergence_study(FracOrder::new(a)?, l, delta, ns, &f, &[Norm::L2, Norm::Linf], exec)? {
            for r in &tab.rows {
                t.push(vec![a.into(), delta_cell(delta), r.n.into(), r.h.into(), tab.norm.name().into(), r.error.into(), r.observed_order.into()]);
            }
            t.meta(&format!("fitted_order_a{a}_{}", tab.norm.name()), format!("{:.6}", tab.fitted_order));
        }
    }
    t.meta("reference_N", ns.iter().max().copied().unwrap_or(0));
    Ok(t)
}

/// Max error of the discrete directional operator applied to the smooth
/// disk solution `u₂` at the interior points of the polar grid of size `i`.
pub fn gl_convergence(alphas: &[f64], hs: &[f64], i: usize, exec: Execution) -> Result<Table, CliError> {
    let pts = generate_disk_points(i)?.interior;
    let mut t = Table::new(&["alpha", "h", "max_error", "observed_order"]);
    for &a in alphas {
        let (u, f) = dyda_pair(a, DydaVariant::Two)?;
        let mut errs = Vec::new();
        for &h in hs {
            let op = DirectionalGL::new(FracOrder::new(a)?, GLScheme::new(h, 1)?, DirQuadrature::gauss_legendre(16)?, Domain::disk(1.0)?)?;
            let e: Vec<Result<f64, fraclap::FracError>> = map_range(exec, pts.len(), |k| Ok((op.apply(&u, &u, pts[k])? - f.eval(pts[k])).abs()));
            let e = e.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
            let order = errs.last().map(|&(h0, e0): &(f64, f64)| (e0 / e).ln() / (h0 / h).ln());
            t.push(vec![a.into(), h.into(), e.into(), order.into()]);
            errs.push((h, e));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = errs.into_iter().unzip();
        t.meta(&format!("slope_a{a}"), format!("{:.6}", loglog_slope(&xs, &ys)));
    }
    Ok(t)
}

/// Nonharmonic liftings `v = x` and `v = x³` against harmonic lifting on the
/// 1D nonzero-data cases, with a complete mesh eigenbasis. `α = 2` is always
/// added and compared with the classical solutions as well.
pub fn lifting_equivalence(alphas: &[f64], cells: usize) -> Result<Table, CliError> {
    let dom = Domain::interval(1.0)?;
    let basis = Arc::new(EigenBasis::fem_interval(&dom, cells, None)?);
    let g = ScalarField::from_1d(|x| x);
    let nodes: Vec<f64> = (0..=cells).map(|i| -1.0 + 2.0 * i as f64 / cells as f64).collect();
    let mut t = Table::new(&["case", "alpha", "lifting", "max_diff_vs_harmonic", "max_error_vs_exact"]);
    let mut orders = alphas.to_vec();
    if !orders.contains(&2.0) {
        orders.push(2.0);
    }
    let mut worst = 0.0f64;
    for (name, sign) in [("I", -1.0), ("II", 1.0)] {
        let f = ScalarField::interior(move |x| sign * x[0]);
        let exact = |x: f64| -sign * x.powi(3) / 6.0 + (1.0 + sign / 6.0) * x;
        for &a in &orders {
            let h = solve_inhomogeneous_lifting(&f, &g, &basis, a)?.nodal_values().expect("mesh basis");
            let err = (a == 2.0).then(|| h.iter().zip(&nodes).fold(0.0f64, |m, (u, &x)| m.max((u - exact(x)).abs())));
            t.push(vec![name.into(), a.into(), "harmonic".into(), 0.0.into(), err.into()]);
            for (label, v) in [("x", DiffField::new(|p| p[0], |_| [1.0, 0.0])), ("x3", DiffField::new(|p| p[0].powi(3), |p| [3.0 * p[0] * p[0], 0.0]))] {
                let n = solve_inhomogeneous_nonharmonic(&f, &g, &v, &basis, a)?.nodal_values().expect("mesh basis");
                let d = h.iter().zip(&n).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
                worst = worst.max(d);
                let err = (a == 2.0).then(|| n.iter().zip(&nodes).fold(0.0f64, |m, (u, &x)| m.max((u - exact(x)).abs())));
                t.push(vec![name.into(), a.into(), label.into(), d.into(), err.into()]);
            }
        }
    }
    t.meta("cells", cells).meta("max_diff", format!("{worst:.3e}"));
    Ok(t)
}

/// `(-Δ_{Ω,g})^{α/2}` of `u = cos(πx) sin(πy)` on `[0, 1]^2` by the lifting
/// series and by the heat semigroup (eigen-exact, then forward Euler with
/// the given steps), compared on a `grid × grid` point set.
pub fn heatsg_equivalence(alpha: f64, k: usize, nt: usize, dts: &[f64], grid: usize) -> Result<Table, CliError> {
    let dom = Domain::rectangle_centered([0.5, 0.5], 0.5, 0.5)?;
    let basis = Arc::new(EigenBasis::analytic(&dom, k)?);
    let u = ScalarField::whole_space(|x| (PI * x[0]).cos() * (PI * x[1]).sin());
    let a = FracOrder::new(alpha)?;
    let l1 = basis.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    // e^{-λ₁ T} = e^{-28} < 1e-12
    let big_t = 28.0 / l1;
    let pts: Vec<Point> = (0..grid)
        .flat_map(|i| (0..grid).map(move |j| [(i as f64 + 0.5) / grid as f64, (j as f64 + 0.5) / grid as f64]))
        .collect();
    let series = apply_fraclap_inhomogeneous(&u, &u, &basis, alpha)?;
    let vs: Vec<f64> = pts.iter().map(|&p| series.eval(p)).collect();
    let cfg = HeatSGConfig::new(big_t, nt)?;
    let exact = apply_fraclap_heatsg(&u, &u, &basis, &cfg, a)?;
    let ve: Vec<f64> = pts.iter().map(|&p| exact.coeffs.eval(p)).collect();
    let maxdiff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let mut t = Table::new(&["mode", "dt", "max_diff_vs_series", "max_diff_vs_eigen_exact"]);
    t.push(vec!["eigen-exact".into(), Cell::Missing, maxdiff(&ve, &vs).into(), 0.0.into()]);
    for &dt in dts {
        let out = apply_fraclap_heatsg(&u, &u, &basis, &cfg.with_euler(dt)?, a)?;
        let v: Vec<f64> = pts.iter().map(|&p| out.coeffs.eval(p)).collect();
        t.push(vec!["euler".into(), dt.into(), maxdiff(&v, &vs).into(), maxdiff(&v, &ve).into()]);
    }
    t.meta("T", big_t).meta("nt", nt).meta("modes", k);
    for w in exact.warnings {
        t.meta("warning", w);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy)]
pub struct RbfVsWos {
    pub alpha: f64,
    pub i: usize,
    pub h: f64,
    pub k2: usize,
    pub paths: usize,
    pub kernel_samples: usize,
    pub seed: u64,
}

/// Unit disk, `f = 0`, `g = exp(-|x|²)`: RBF collocation against
/// walk-on-spheres and the Poisson-kernel integral at `probes`.
pub fn rbf_vs_wos(cfg: &RbfVsWos, probes: &[Point], exec: Execution) -> Result<Table, CliError> {
    let a = FracOrder::new(cfg.alpha)?;
    let g = ScalarField::whole_space(|p| (-(p[0] * p[0] + p[1] * p[1])).exp());
    let f = ScalarField::zero();
    let sol = RbfSetup::disk(cfg.i, a, cfg.h, cfg.k2)?.solve(&f, &g, exec)?;
    let kernel = PoissonKernel::new(2, 1.0, cfg.alpha)?;
    let mut wcfg = WalkConfig::new(a, cfg.paths, cfg.seed);
    wcfg.exec = exec;
    let mut wos = WosSolver::new(Domain::disk(1.0)?, wcfg)?;
    let mut t = Table::new(&["x", "y", "rbf", "wos", "wos_stderr", "poisson", "poisson_stderr", "rbf_minus_poisson", "rbf_minus_wos"]);
    for (k, &p) in probes.iter().enumerate() {
        let r = sol.eval(p);
        wos.config.seed = cfg.seed.wrapping_add(k as u64);
        let w = wos.solve(p, &f, &g)?;
        let q = kernel.solution(&g, p, cfg.kernel_samples, cfg.seed.wrapping_add(1000 + k as u64), exec)?;
        t.push(vec![p[0].into(), p[1].into(), r.into(), w.mean.into(), w.stderr.into(), q.mean.into(), q.stderr.into(), (r - q.mean).into(), (r - w.mean).into()]);
    }
    t.meta("condition_estimate", format!("{:.3e}", sol.condition));
    Ok(t)
}

/// Square, `f = 1`, `g = exp(-|x|²)`: one factorization, one right-hand side
/// per `K2`. Reports the change in the solution at the collocation points
/// from the previous `K2` and from the largest one, and the truncation
/// remainder (summed to index 20000) at the centre and at `(0.98, 0)`.
pub fn rbf_truncation(alpha: f64, n: usize, h: f64, k2s: &[usize], exec: Execution) -> Result<Table, CliError> {
    let mut k2s = k2s.to_vec();
    k2s.sort_unstable();
    let setup = RbfSetup::square(n, FracOrder::new(alpha)?, h, k2s[0])?;
    let f = ScalarField::interior(|_| 1.0);
    let g = ScalarField::whole_space(|p| (-(p[0] * p[0] + p[1] * p[1])).exp());
    let sys = assemble(&setup.colloc, &setup.rbf, &setup.op, &f, &g, exec)?;
    let lu = FactoredSystem::new(&sys)?;
    let pts = setup.colloc.points();
    let mut sols = Vec::new();
    for &k2 in &k2s {
        // the matrix does not depend on K2, only the exterior sum does
        let op = DirectionalGL::new(FracOrder::new(alpha)?, GLScheme::new(h, k2)?, setup.op.quad.clone(), setup.op.domain.clone())?;
        let rhs = assemble_rhs(&setup.colloc, &op, &f, &g, exec)?;
        let s = lu.solve(&sys, &rhs);
        let rem = [op.integrated_remainder(&g, [0.0, 0.0], 20_000), op.integrated_remainder(&g, [0.98, 0.0], 20_000)];
        sols.push((s.evaluate(&pts), s.eval([0.0, 0.0]), rem));
    }
    let l2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let last = &sols.last().expect("at least one K2").0;
    let mut t = Table::new(&["K2", "l2_change", "max_change", "l2_diff_vs_last", "u_center", "remainder_center", "remainder_edge"]);
    for (i, (u, centre, rem)) in sols.iter().enumerate() {
        let (ch, mx) = match i.checked_sub(1).map(|j| &sols[j].0) {
            Some(p) => (Some(l2(u, p)), Some(u.iter().zip(p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))),
            None => (None, None),
        };
        t.push(vec![k2s[i].into(), ch.into(), mx.into(), l2(u, last).into(), (*centre).into(), rem[0].abs().into(), rem[1].abs().into()]);
    }
    t.meta("condition_estimate", format!("{:.3e}", lu.condition));
    Ok(t)
}
