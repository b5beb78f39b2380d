//! Walk-on-spheres for the Riesz problem `(-Δ)^{α/2} u = f` in `Ω`, `u = g`
//! on `R^d \ Ω`.
//!
//! From `ρ_0 = x` the walk inscribes the largest ball `B(ρ_n, r_{n+1})` in
//! `Ω` and jumps to the exit point of the stable process from that ball,
//! stopping at the first `ρ_N ∉ Ω`. Then
//!
//! `u(x) = E[g(ρ_N)] + E[Σ_{n<N} r_{n+1}^α V_1(0, f(ρ_n + r_{n+1} ·))]`.
//!
//! Termination is exact (the process leaves by a jump), so no boundary shell
//! is needed. Each path draws from its own ChaCha8 stream, which makes the
//! estimate independent of the thread count.

mod exit;
mod occupation;
mod rng;

pub use exit::{exit_density, exit_density_gap, exit_radius_cdf, sample_exit_radius, sample_exit_unit_ball};
pub use occupation::{occupation_radial_density, OccupationTable};
pub use rng::{sample_beta, StableRng};

use crate::domain::{Domain, Point};
use crate::error::{FracError, Result};
use crate::field::{ScalarField, Support};
use crate::order::FracOrder;
use crate::par::{map_range, Execution};
use crate::stats::Welford;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub alpha: FracOrder,
    pub num_paths: usize,
    /// Source samples per sphere.
    pub occupation_samples: usize,
    pub max_steps: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl WalkConfig {
    pub fn new(alpha: FracOrder, num_paths: usize, seed: u64) -> Self {
        WalkConfig { alpha, num_paths, occupation_samples: 1, max_steps: 100_000, seed, exec: Execution::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_paths == 0 || self.occupation_samples == 0 || self.max_steps == 0 {
            return Err(FracError::InvalidParameter(
                "paths, occupation samples and max steps must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√num_paths`.
    pub stderr: f64,
    /// Paths that terminated and entered the mean.
    pub num_paths: usize,
    pub mean_steps: f64,
    /// Paths dropped for exceeding `max_steps`.
    pub discarded: usize,
}

/// One realized walk: sphere centres and radii, then the exit point.
#[derive(Debug, Clone)]
pub struct Walk {
    pub spheres: Vec<(Point, f64)>,
    pub exit: Point,
}

/// Runs one walk from `x0`.
pub fn walk(x0: Point, dom: &Domain, alpha: FracOrder, rng: &mut StableRng, max_steps: usize) -> Result<Walk> {
    let d = dom.dim();
    let a = alpha.value();
    let mut rho = x0;
    let mut spheres = Vec::new();
    loop {
        if !dom.contains_strict(rho) {
            return Ok(Walk { spheres, exit: rho });
        }
        if spheres.len() == max_steps {
            return Err(FracError::Domain(format!("walk exceeded {max_steps} steps")));
        }
        let r = dom.inscribed_radius(rho)?;
        spheres.push((rho, r));
        let e = sample_exit_unit_ball(rng, d, a);
        rho = [rho[0] + r * e[0], rho[1] + r * e[1]];
    }
}

/// Pointwise solver holding the occupation table for one `(d, α)`.
#[derive(Debug, Clone)]
pub struct WosSolver {
    pub domain: Domain,
    pub config: WalkConfig,
    table: Option<OccupationTable>,
}

/// Paths per deterministic reduction block.
const BLOCK: usize = 256;

impl WosSolver {
    pub fn new(domain: Domain, config: WalkConfig) -> Result<Self> {
        config.validate()?;
        Ok(WosSolver { domain, config, table: None })
    }

    fn table(&mut self) -> Result<&OccupationTable> {
        if self.table.is_none() {
            self.table = Some(OccupationTable::new(self.domain.dim(), self.config.alpha.value())?);
        }
        Ok(self.table.as_ref().expect("just built"))
    }

    /// Estimates `u(x)`. `g` must be defined on the whole exterior.
    pub fn solve(&mut self, x: Point, f: &ScalarField, g: &ScalarField) -> Result<WalkEstimate> {
        if !self.domain.contains_strict(x) {
            return Err(FracError::Domain(format!("({}, {}) is not interior to the {}", x[0], x[1], self.domain.name())));
        }
        if g.support == Support::Interior && !g.is_known_zero() {
            return Err(FracError::InvalidParameter("exterior data must be a whole-space field".into()));
        }
        let with_source = !f.is_known_zero();
        if with_source {
            self.table()?;
        }
        let cfg = self.config;
        let dom = &self.domain;
        let table = self.table.as_ref();
        let a = cfg.alpha.value();
        let blocks = cfg.num_paths.div_ceil(BLOCK);
        let partial: Vec<(Welford, u64, usize)> = map_range(cfg.exec, blocks, |b| {
            let mut w = Welford::default();
            let mut steps = 0u64;
            let mut dropped = 0usize;
            for p in b * BLOCK..((b + 1) * BLOCK).min(cfg.num_paths) {
                let mut rng = StableRng::new(cfg.seed, p as u64);
                match walk(x, dom, cfg.alpha, &mut rng, cfg.max_steps) {
                    Ok(path) => {
                        let mut v = g.eval(path.exit);
                        if let Some(t) = table.filter(|_| with_source) {
                            for &(c, r) in &path.spheres {
                                v += r.powf(a) * t.integral(f, c, r, &mut rng, cfg.occupation_samples);
                            }
                        }
                        steps += path.spheres.len() as u64;
                        w.push(v);
                    }
                    Err(_) => dropped += 1,
                }
            }
            (w, steps, dropped)
        });
        let mut total = Welford::default();
        let mut steps = 0u64;
        let mut discarded = 0;
        for (w, s, d) in &partial {
            total.merge(w);
            steps += s;
            discarded += d;
        }
        if total.count == 0 {
            return Err(FracError::Domain("every walk exceeded the step limit".into()));
        }
        Ok(WalkEstimate {
            mean: total.mean(),
            stderr: total.stderr(),
            num_paths: total.count as usize,
            mean_steps: steps as f64 / total.count as f64,
            discarded,
        })
    }
}

/// One-shot estimate of `u(x)`.
pub fn solve_pointwise(x: Point, f: &ScalarField, g: &ScalarField, dom: &Domain, cfg: WalkConfig) -> Result<WalkEstimate> {
    WosSolver::new(dom.clone(), cfg)?.solve(x, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::occupation_mass;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn disk_center_exits_in_one_step() {
        let dom = Domain::disk(1.0).unwrap();
        let mut rng = StableRng::new(3, 0);
        for _ in 0..100 {
            let w = walk([0.0, 0.0], &dom, order(1.2), &mut rng, 10).unwrap();
            assert_eq!(w.spheres.len(), 1);
            assert!((w.spheres[0].1 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn walk_invariants_on_square_and_lshape() {
        for dom in [Domain::rectangle(1.0, 1.0).unwrap(), Domain::lshape()] {
            let x0 = if matches!(dom, Domain::LShape) { [-0.5, -0.5] } else { [0.0, 0.0] };
            let mut total = 0;
            for p in 0..10_000u64 {
                let mut rng = StableRng::new(1, p);
                let w = walk(x0, &dom, order(1.5), &mut rng, 100_000).unwrap();
                assert!(w.spheres.iter().all(|&(c, r)| dom.contains_strict(c) && r > 0.0));
                assert!(!dom.contains_strict(w.exit));
                total += w.spheres.len();
            }
            assert!((total as f64 / 10_000.0) < 50.0);
        }
    }

    #[test]
    fn constant_data_is_exact() {
        let dom = Domain::rectangle(1.0, 0.5).unwrap();
        let cfg = WalkConfig::new(order(0.7), 2000, 4);
        let est = solve_pointwise([0.2, 0.1], &ScalarField::zero(), &ScalarField::constant(1.0), &dom, cfg).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn ball_solution_and_thread_independence() {
        let dom = Domain::disk(1.0).unwrap();
        for a in [0.5, 1.5] {
            let m = occupation_mass(2, a).unwrap();
            for x in [[0.0, 0.0], [0.5, 0.0]] {
                let mut cfg = WalkConfig::new(order(a), 20_000, 17);
                let est = solve_pointwise(x, &ScalarField::constant(1.0), &ScalarField::zero(), &dom, cfg).unwrap();
                let exact = m * (1.0 - x[0] * x[0]).powf(a / 2.0);
                assert!((est.mean - exact).abs() <= 3.0 * est.stderr + 1e-12, "α={a} x={x:?}: {est:?} vs {exact}");
                cfg.exec = Execution::Sequential;
                let seq = solve_pointwise(x, &ScalarField::constant(1.0), &ScalarField::zero(), &dom, cfg).unwrap();
                assert_eq!(seq, est);
            }
        }
    }

    #[test]
    fn interval_ball_solution() {
        let dom = Domain::interval(1.0).unwrap();
        let a = 1.5;
        let cfg = WalkConfig::new(order(a), 20_000, 5);
        let est = solve_pointwise([0.3, 0.0], &ScalarField::constant(1.0), &ScalarField::zero(), &dom, cfg).unwrap();
        let exact = occupation_mass(1, a).unwrap() * (1.0f64 - 0.09).powf(a / 2.0);
        assert!((est.mean - exact).abs() < 3.0 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn exit_angles_are_uniform() {
        let dom = Domain::disk(1.0).unwrap();
        let bins = 16;
        let n = 100_000;
        let mut counts = vec![0usize; bins];
        for p in 0..n {
            let mut rng = StableRng::new(8, p as u64);
            let w = walk([0.0, 0.0], &dom, order(1.1), &mut rng, 10).unwrap();
            let t = w.exit[1].atan2(w.exit[0]) + std::f64::consts::PI;
            counts[((t / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let e = n as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 15 degrees of freedom: P(χ² > 37.7) = 0.001
        assert!(chi2 < 37.7, "{chi2}");
    }

    #[test]
    fn rejects_exterior_start_and_interior_only_data() {
        let dom = Domain::disk(1.0).unwrap();
        let cfg = WalkConfig::new(order(1.0), 10, 0);
        assert!(solve_pointwise([2.0, 0.0], &ScalarField::zero(), &ScalarField::zero(), &dom, cfg).is_err());
        let g = ScalarField::interior(|_| 1.0);
        assert!(solve_pointwise([0.0, 0.0], &ScalarField::zero(), &g, &dom, cfg).is_err());
    }
}
