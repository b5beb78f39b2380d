// Acceptance run: one PASS/FAIL line per criterion with the measured numbers
// and the pinned tolerances. The process exits 0 unless
// FRACLAP_ACCEPTANCE_STRICT=1 is set, in which case any FAIL exits 1.

use fraclap::fvm::{self, FVGrid};
use fraclap::quadrature::tanh_sinh;
use fraclap::rbf::{
    assemble, assemble_rhs, generate_disk_points, DirectionalGL, FactoredSystem, GLScheme, RbfSetup,
};
use fraclap::reference::{dyda_pair, exact_ball_constant_f, DydaVariant, PoissonKernel};
use fraclap::spectral::{solve_homogeneous, EigenBasis};
use fraclap::wos::{exit_density_gap, exit_radius_cdf, sample_exit_radius, StableRng, WalkConfig, WosSolver};
use fraclap::{c_alpha_1d, directional_constant, riesz_constant, Domain, Execution, FracOrder, Point, ScalarField};
use fraclap_cli::study::{
    default_probes, fvm_convergence, gl_convergence, heatsg_equivalence, horizon, lifting_equivalence, monotonicity,
    rbf_truncation,
};
use fraclap_cli::{CaseRegistry, GridSpec, RunConfig, SolverKind, Table};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

const EXEC: Execution = Execution::Parallel;

fn fo(a: f64) -> FracOrder {
    FracOrder::new(a).expect("order in (0, 2)")
}

fn meta_f64(t: &Table, key: &str) -> Result<f64, Box<dyn std::error::Error>> {
    Ok(t.get_meta(key).ok_or_else(|| format!("missing {key}"))?.parse()?)
}

fn eigenfunction_exactness() -> Outcome {
    let start = Instant::now();
    let basis = Arc::new(EigenBasis::interval(1.0, 64)?);
    let f = ScalarField::interior(|x| (PI * x[0]).sin());
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 1.5] {
        let u = solve_homogeneous(&f, &basis, fo(a));
        for i in 0..=400 {
            let x = -1.0 + i as f64 / 200.0;
            worst = worst.max((u.eval([x, 0.0]) - PI.powf(-a) * (PI * x).sin()).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-10 && secs < 1.0, format!("max error {worst:.2e} (tol 1e-10), {secs:.3} s (limit 1 s)")))
}

fn lifting_equivalence_check() -> Outcome {
    let t = lifting_equivalence(&[0.2, 0.5, 1.0, 1.5, 1.9], 256)?;
    let diff = t.column("max_diff_vs_harmonic")?.into_iter().fold(0.0, f64::max);
    let exact = t.column("max_error_vs_exact")?.into_iter().filter(|v| !v.is_nan()).fold(0.0, f64::max);
    Ok((
        diff <= 1e-10 && exact <= 1e-10,
        format!("nonharmonic vs harmonic {diff:.2e} (tol 1e-10); alpha=2 vs x^3/6+5x/6 {exact:.2e} (tol 1e-10)"),
    ))
}

fn heat_semigroup_equivalence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.5] {
        let t = heatsg_equivalence(a, 100, 400, &[1e-3, 5e-4, 2.5e-4, 1.25e-4], 21)?;
        let vs_series = t.column("max_diff_vs_series")?;
        let euler: Vec<f64> = t.column("max_diff_vs_eigen_exact")?[1..].to_vec();
        let monotone = euler.windows(2).all(|w| w[1] < w[0]);
        ok &= vs_series[0] <= 1e-5 && monotone;
        parts.push(format!(
            "alpha={a}: eigen-exact vs series {:.2e} (tol 1e-5), Euler errors {} ({})",
            vs_series[0],
            euler.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" > "),
            if monotone { "decreasing" } else { "not decreasing" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn wos_ball() -> Outcome {
    let start = Instant::now();
    let f = ScalarField::interior(|_| 1.0);
    let g = ScalarField::zero();
    let disk = Domain::disk(1.0)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.5] {
        let exact = exact_ball_constant_f(2, a, 1.0, [0.0, 0.0])?;
        let mut cfg = WalkConfig::new(fo(a), 100_000, 2024);
        cfg.exec = EXEC;
        let mut solver = WosSolver::new(disk.clone(), cfg)?;
        for x in [[0.0, 0.0], [0.5, 0.0]] {
            let est = solver.solve(x, &f, &g)?;
            let e = exact.eval(x);
            let z = (est.mean - e).abs();
            // from the centre the first ball is the disk itself, so the estimate is exact
            ok &= z <= 3.0 * est.stderr + 1e-12;
            parts.push(format!("a={a} x={x:?}: {:.5} vs {e:.5} ({:.1} se)", est.mean, if est.stderr > 0.0 { z / est.stderr } else { 0.0 }));
        }
        solver.config.num_paths = 200_000;
        let doubled = solver.solve([0.5, 0.0], &f, &g)?;
        solver.config.num_paths = 100_000;
        let single = solver.solve([0.5, 0.0], &f, &g)?;
        let ratio = single.stderr / doubled.stderr;
        let within = (ratio / 2f64.sqrt() - 1.0).abs() <= 0.15;
        ok &= within;
        parts.push(format!("a={a} stderr ratio under doubling {ratio:.3} (sqrt 2 +- 15%)"));
    }
    let centre = exact_ball_constant_f(2, 1.5, 1.0, [0.0, 0.0])?.eval([0.0, 0.0]);
    ok &= (centre - 0.41857).abs() < 5e-6;
    parts.push(format!("closed form at 0, a=1.5: {centre:.5}; {:.1} s", start.elapsed().as_secs_f64()));
    Ok((ok, parts.join("; ")))
}

fn exit_law() -> Outcome {
    let n = 1_000_000;
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        let mut rng = StableRng::new(99, 0);
        let mut r: Vec<f64> = (0..n).map(|_| sample_exit_radius(&mut rng, a)).collect();
        r.sort_by(f64::total_cmp);
        let mut ks = 0.0f64;
        for (i, &x) in r.iter().enumerate() {
            let c = exit_radius_cdf(a, x)?;
            ks = ks.max((c - i as f64 / n as f64).abs()).max(((i + 1) as f64 / n as f64 - c).abs());
        }
        ok &= ks < 0.002;
        let mut worst = 0.0f64;
        for d in [1usize, 2] {
            // r = 1 + s/(1-s) maps (0, 1) onto (1, inf)
            let total = tanh_sinh(
                |_, ds, db| {
                    if db < 1e-100 {
                        return 0.0;
                    }
                    let gap = ds / db;
                    let surf = if d == 1 { 2.0 } else { 2.0 * PI * (1.0 + gap) };
                    surf * exit_density_gap(d, a, gap).expect("valid order") / (db * db)
                },
                0.0,
                1.0,
                1.0 / 64.0,
                6.0,
            );
            worst = worst.max((total - 1.0).abs());
        }
        ok &= worst <= 1e-8;
        parts.push(format!("a={a}: KS {ks:.2e} (tol 2e-3), |mass - 1| {worst:.1e} (tol 1e-8)"));
    }
    Ok((ok, parts.join("; ")))
}

fn gl_first_order() -> Outcome {
    let t = gl_convergence(&[0.5, 1.5], &[4e-3, 2e-3, 1e-3], 39, EXEC)?;
    let (s05, s15) = (meta_f64(&t, "slope_a0.5")?, meta_f64(&t, "slope_a1.5")?);
    let ok = (s05 - 1.0).abs() <= 0.2 && (s15 - 1.0).abs() <= 0.2;
    Ok((ok, format!("slopes {s05:.3} (a=0.5), {s15:.3} (a=1.5); target 1.0 +- 0.2")))
}

fn rel_l2(u: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = u.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = exact.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

fn rbf_convergence_and_cross_validation() -> Outcome {
    let start = Instant::now();
    let a = fo(1.5);
    let h = 1e-3;
    let (u2, f2) = dyda_pair(1.5, DydaVariant::Two)?;
    let zero = ScalarField::zero();
    let test = generate_disk_points(39)?.points();
    let exact: Vec<f64> = test.iter().map(|&p| u2.eval(p)).collect();
    let mut errs = Vec::new();
    for i in [9, 19] {
        let s = RbfSetup::disk(i, a, h, 1)?.solve(&f2, &zero, EXEC)?;
        errs.push(rel_l2(&s.evaluate(&test), &exact));
    }
    // I = 39: one matrix, reused for the Dyda problem and the exterior-data problem
    let setup = RbfSetup::disk(39, a, h, 1)?;
    let sys = assemble(&setup.colloc, &setup.rbf, &setup.op, &f2, &zero, EXEC)?;
    let lu = FactoredSystem::new(&sys)?;
    errs.push(rel_l2(&lu.solve(&sys, &sys.rhs).evaluate(&test), &exact));
    let converging = errs.windows(2).all(|w| w[1] < w[0]);

    let g = ScalarField::whole_space(|p: Point| (-(p[0] * p[0] + p[1] * p[1])).exp());
    let op = DirectionalGL::new(a, GLScheme::new(h, 6000)?, setup.op.quad.clone(), setup.op.domain.clone())?;
    let rhs = assemble_rhs(&setup.colloc, &op, &ScalarField::zero(), &g, EXEC)?;
    let sol = lu.solve(&sys, &rhs);
    let kernel = PoissonKernel::new(2, 1.0, 1.5)?;
    let mut worst_z = 0.0f64;
    let mut worst_rel = 0.0f64;
    for (k, &p) in default_probes().iter().enumerate() {
        let q = kernel.solution(&g, p, 1_000_000, 500 + k as u64, EXEC)?;
        let r = sol.eval(p);
        worst_z = worst_z.max((r - q.mean).abs() / q.stderr);
        worst_rel = worst_rel.max(((r - q.mean) / q.mean).abs());
    }
    let matches = worst_z <= 3.0;

    let t = rbf_truncation(1.5, 41, h, &[1000, 1200, 1600, 2000, 3000, 4000, 6000], EXEC)?;
    let vs_last = t.column("l2_diff_vs_last")?;
    let rem: Vec<(f64, f64)> = t.column("remainder_center")?.into_iter().zip(t.column("remainder_edge")?).collect();
    let decays = vs_last.windows(2).all(|w| w[1] < w[0]) && rem.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let final_change = *t.column("l2_change")?.last().expect("rows");
    let ok = converging && matches && decays && final_change < 1e-6;
    Ok((
        ok,
        format!(
            "rel L2 errors I=9,19,39: {} ({}); exterior data vs Poisson kernel at 10 probes: max {worst_z:.1} combined se (tol 3), max rel {worst_rel:.2e}; K2 table {} with final change {final_change:.2e} (tol 1e-6); {:.0} s",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", "),
            if converging { "decreasing" } else { "not decreasing" },
            if decays { "decays monotonically" } else { "does not decay monotonically" },
            start.elapsed().as_secs_f64()
        ),
    ))
}

fn fvm_rates() -> Outcome {
    let start = Instant::now();
    let t = fvm_convergence(&[0.5, 1.5], 1.0, 2.0, &[256, 512, 1024, 2048, 32768], EXEC)?;
    let secs = start.elapsed().as_secs_f64();
    let checks = [("a0.5_L2", 1.2), ("a1.5_L2", 1.5), ("a0.5_Linf", 0.5), ("a1.5_Linf", 0.7)];
    let mut ok = secs < 60.0;
    let mut parts = Vec::new();
    for (key, target) in checks {
        let v = meta_f64(&t, &format!("fitted_order_{key}"))?;
        let pass = (v - target).abs() <= 0.3;
        ok &= pass;
        parts.push(format!("{key} {v:.3} (target {target} +- 0.3{})", if pass { "" } else { ", out" }));
    }
    parts.push(format!("{secs:.1} s (limit 60 s)"));
    Ok((ok, parts.join("; ")))
}

fn horizon_rates() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, target) in [(1.5, -1.5), (0.5, -0.5)] {
        let t = horizon(a, 1.0, 1 << 14, &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0], EXEC)?;
        let s = meta_f64(&t, "fitted_slope")?;
        let pass = (s - target).abs() <= 0.2;
        ok &= pass;
        parts.push(format!("a={a}: slope {s:.3} (target {target} +- 0.2{})", if pass { "" } else { ", out" }));
    }
    Ok((ok, parts.join("; ")))
}

fn cross_definition_properties() -> Outcome {
    let mut parts = Vec::new();
    let one = ScalarField::interior(|_| 1.0);

    // (a) 1D: finite volumes in the Riesz limit against the spectral series
    let mut min_1d = f64::INFINITY;
    for a in [0.5, 1.5] {
        let grid = FVGrid::new(1.0, 1 << 12, f64::INFINITY)?;
        let s = fvm::assemble(&grid, fo(a), true)?;
        let riesz = fvm::solve(&s, &one, &grid, fvm::Backend::Fast)?;
        let basis = Arc::new(EigenBasis::interval(1.0, 2000)?);
        let spectral = solve_homogeneous(&one, &basis, fo(a));
        for i in 1..200 {
            let x = -1.0 + i as f64 / 100.0;
            min_1d = min_1d.min(riesz.eval(x) - spectral.eval([x, 0.0]));
        }
    }
    let a1 = min_1d >= -1e-6;
    parts.push(format!("(a) 1D min(Riesz - spectral) {min_1d:.3e} (tol -1e-6)"));

    // (a) 2D disk: walk-on-spheres against the Fourier-Bessel series
    let mut worst_z = f64::NEG_INFINITY;
    let probes: Vec<Point> = default_probes().into_iter().take(9).collect();
    for a in [0.5, 1.5] {
        let basis = Arc::new(EigenBasis::disk(1.0, 400)?);
        let spectral = solve_homogeneous(&one, &basis, fo(a));
        let mut cfg = WalkConfig::new(fo(a), 100_000, 77);
        cfg.exec = EXEC;
        let mut wos = WosSolver::new(Domain::disk(1.0)?, cfg)?;
        for &p in &probes {
            let w = wos.solve(p, &one, &ScalarField::zero())?;
            let d = w.mean - spectral.eval(p);
            // negative z means Riesz below spectral
            let z = if d >= -1e-6 { 0.0 } else { (-1e-6 - d) / w.stderr.max(1e-300) };
            worst_z = worst_z.max(z);
        }
    }
    let a2 = worst_z <= 3.0;
    parts.push(format!("(a) disk: worst shortfall {worst_z:.2} se below spectral (tol 3)"));

    // (b) scaling law
    let t = monotonicity(&[0.5, 2.0, 5.0], &[0.25, 0.5, 1.0, 1.5, 1.75], 256, EXEC)?;
    let dev = t.column("scaling_ratio")?.into_iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
    let b = dev <= 1e-8;
    parts.push(format!("(b) max |M_L / (L^a M_1) - 1| {dev:.2e} (tol 1e-8)"));

    // (c) nonzero exterior data on the square: spectral above Riesz
    let registry = CaseRegistry::standard();
    let probes: Vec<Point> = vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5], [-0.3, 0.6], [-0.7, -0.7]];
    let grid = GridSpec::Points { points: probes.clone() };
    let mut cfg = RunConfig::new("square-inhom", SolverKind::SpectralLift);
    cfg.grid = grid.clone();
    let spec = fraclap_cli::run(&cfg, &registry)?;
    let mut cfg = RunConfig::new("square-inhom", SolverKind::Wos).param("paths", 100_000);
    cfg.grid = grid;
    cfg.seed = 3;
    let wos = fraclap_cli::run(&cfg, &registry)?;
    let (us, uw, se) = (spec.column("u")?, wos.column("u")?, wos.column("stderr")?);
    let min_z = us.iter().zip(&uw).zip(&se).map(|((s, w), e)| (s - w) / e).fold(f64::INFINITY, f64::min);
    let c = min_z > 3.0;
    parts.push(format!("(c) square-inhom: spectral - WOS at least {min_z:.1} se at {} probes (need > 3)", probes.len()));
    Ok((a1 && a2 && b && c, parts.join("; ")))
}

fn constant_consistency() -> Outcome {
    let mut worst_riesz = 0.0f64;
    let mut worst_dir = 0.0f64;
    for i in 1..=19 {
        let a = i as f64 / 10.0;
        let r = riesz_constant(1, fo(a))?;
        worst_riesz = worst_riesz.max(((r - c_alpha_1d(fo(a))) / r).abs());
        // the directional form has a pole at a = 1, where the identity holds only as a limit
        if i != 10 {
            let c = directional_constant(1, fo(a))?;
            worst_dir = worst_dir.max((2.0 * c * (0.5 * PI * a).cos() - 1.0).abs());
        }
    }
    Ok((
        worst_riesz <= 1e-12 && worst_dir <= 1e-12,
        format!("riesz vs 1D constant rel {worst_riesz:.1e}; |2 C cos(pi a/2) - 1| {worst_dir:.1e} (a != 1); tol 1e-12"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("eigenfunction exactness", eigenfunction_exactness),
        ("lifting equivalence", lifting_equivalence_check),
        ("heat-semigroup equivalence", heat_semigroup_equivalence),
        ("walk-on-spheres on the ball", wos_ball),
        ("exit law", exit_law),
        ("GL first-order convergence", gl_first_order),
        ("RBF convergence and cross-validation", rbf_convergence_and_cross_validation),
        ("FVM convergence rates", fvm_rates),
        ("horizon convergence", horizon_rates),
        ("cross-definition properties", cross_definition_properties),
        ("constant consistency", constant_consistency),
    ];
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        passed += ok as usize;
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{passed}/{} PASS", criteria.len());
    if std::env::var("FRACLAP_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") && passed < criteria.len() {
        std::process::exit(1);
    }
}
