//! Exact solutions and independent oracles for the integral operator.
//!
//! * [`dyda_pair`]: closed-form pairs `(u, (-Δ)^{α/2} u)` on the unit disk.
//! * [`exact_ball_constant_f`]: the solution with `f = 1`, `g = 0` on a ball.
//! * [`PoissonKernel`]: the harmonic extension of exterior data on a ball,
//!   integrated by importance sampling.
//! * [`oracle_riesz_pointwise`]: brute-force quadrature of the singular
//!   integral, the arbiter for the closed forms above.

use crate::constants::{occupation_mass, riesz_constant};
use crate::domain::{dist, norm, Domain, Point};
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::order::FracOrder;
use crate::par::{map_range, Execution};
use crate::quadrature::adaptive_gk;
use crate::special::gamma;
use crate::stats::Welford;
use crate::wos::{sample_exit_unit_ball, StableRng};
use std::f64::consts::PI;

/// Which of the two fabricated disk solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DydaVariant {
    /// `u = (1-|x|^2)_+^{α/2}`, constant right-hand side.
    One,
    /// `u = (1-|x|^2)_+^{1+α/2}`, quadratic right-hand side.
    Two,
}

/// `(u, f)` with `(-Δ)^{α/2} u = f` in the unit disk and `u = 0` outside:
///
/// * variant 1: `f = 2^α Γ(α/2+1)^2`
/// * variant 2: `f = 2^α Γ(α/2+2) Γ(α/2+1) (1 - (1+α/2)|x|^2)`
pub fn dyda_pair(alpha: f64, variant: DydaVariant) -> Result<(ScalarField, ScalarField)> {
    let a = FracOrder::new(alpha)?.value();
    let half = 0.5 * a;
    Ok(match variant {
        DydaVariant::One => {
            let c = 2f64.powf(a) * gamma(half + 1.0)?.powi(2);
            let u = ScalarField::whole_space(move |x| {
                let t = 1.0 - x[0] * x[0] - x[1] * x[1];
                if t > 0.0 {
                    t.powf(half)
                } else {
                    0.0
                }
            });
            (u, ScalarField::interior(move |_| c))
        }
        DydaVariant::Two => {
            let c = 2f64.powf(a) * gamma(half + 2.0)? * gamma(half + 1.0)?;
            let u = ScalarField::whole_space(move |x| {
                let t = 1.0 - x[0] * x[0] - x[1] * x[1];
                if t > 0.0 {
                    t.powf(1.0 + half)
                } else {
                    0.0
                }
            });
            let f = ScalarField::interior(move |x| c * (1.0 - (1.0 + half) * (x[0] * x[0] + x[1] * x[1])));
            (u, f)
        }
    })
}

/// `u(x) = 2^{-α} Γ(d/2) / (Γ((d+α)/2) Γ(1+α/2)) (r^2 - |x - x0|^2)_+^{α/2}`,
/// the solution with `f = 1` on `B_r(x0)` and zero exterior data.
pub fn exact_ball_constant_f(d: usize, alpha: f64, r: f64, center: Point) -> Result<ScalarField> {
    let a = FracOrder::new(alpha)?.value();
    let m = occupation_mass(d, a)?;
    Ok(ScalarField::whole_space(move |x| {
        let t = r * r - (x[0] - center[0]).powi(2) - (x[1] - center[1]).powi(2);
        if t > 0.0 {
            m * t.powf(0.5 * a)
        } else {
            0.0
        }
    }))
}

/// Fractional Poisson kernel of the ball `B_r` centred at the origin:
///
/// `P_r(y, x) = Γ(d/2) sin(πα/2) / π^{d/2+1} ((r^2-|x|^2)/(|y|^2-r^2))^{α/2} |x-y|^{-d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonKernel {
    pub d: usize,
    pub r: f64,
    pub alpha: f64,
    prefactor: f64,
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl PoissonKernel {
    pub fn new(d: usize, r: f64, alpha: f64) -> Result<Self> {
        if !(d == 1 || d == 2) || !(r > 0.0) {
            return Err(FracError::InvalidParameter(format!("Poisson kernel needs d in {{1, 2}} and r > 0, got d = {d}, r = {r}")));
        }
        let a = FracOrder::new(alpha)?.value();
        let dh = 0.5 * d as f64;
        let prefactor = gamma(dh)? * (0.5 * PI * a).sin() / PI.powf(dh + 1.0);
        Ok(PoissonKernel { d, r, alpha: a, prefactor })
    }

    /// Kernel of a ball of radius `s` about `c`, evaluated at `(y, x)`.
    fn kernel(&self, s: f64, c: Point, y: Point, x: Point) -> f64 {
        let ry = dist(y, c);
        if ry <= s {
            return 0.0;
        }
        let rx = dist(x, c);
        let ratio = (s - rx) * (s + rx) / ((ry - s) * (ry + s));
        self.prefactor * ratio.powf(0.5 * self.alpha) * dist(x, y).powi(-(self.d as i32))
    }

    pub fn density(&self, y: Point, x: Point) -> f64 {
        self.kernel(self.r, [0.0, 0.0], y, x)
    }

    /// `u(x) = ∫_{|y|>r} P_r(y, x) g(y) dy`.
    ///
    /// Half of the draws come from the exit law of `B_r` started at its
    /// centre, half from the exit law of the largest ball about `x`, and each
    /// is weighted against the equal mixture of both densities. The first
    /// family makes `g = 1` exact at `x = 0`; the second keeps the weights
    /// bounded as `x` approaches the sphere.
    pub fn solution(&self, g: &ScalarField, x: Point, samples: usize, seed: u64, exec: Execution) -> Result<McEstimate> {
        let rx = norm(x);
        if rx >= self.r {
            return Err(FracError::Domain(format!("({}, {}) is not inside the ball", x[0], x[1])));
        }
        if samples < 4 {
            return Err(FracError::InvalidParameter("need at least 4 samples".into()));
        }
        let s = self.r - rx;
        let pairs = samples / 2;
        let weight = |y: Point| {
            let q = 0.5 * (self.kernel(self.r, [0.0, 0.0], y, [0.0, 0.0]) + self.kernel(s, x, y, x));
            let p = self.density(y, x);
            if p == 0.0 {
                0.0
            } else {
                p * g.eval(y) / q
            }
        };
        const BLOCK: usize = 1024;
        let blocks = pairs.div_ceil(BLOCK);
        let parts: Vec<Welford> = map_range(exec, blocks, |b| {
            let mut w = Welford::default();
            for k in b * BLOCK..((b + 1) * BLOCK).min(pairs) {
                let mut rng = StableRng::new(seed, k as u64);
                let e1 = sample_exit_unit_ball(&mut rng, self.d, self.alpha);
                let e2 = sample_exit_unit_ball(&mut rng, self.d, self.alpha);
                let y1 = [self.r * e1[0], self.r * e1[1]];
                let y2 = [x[0] + s * e2[0], x[1] + s * e2[1]];
                w.push(0.5 * (weight(y1) + weight(y2)));
            }
            w
        });
        let mut total = Welford::default();
        parts.iter().for_each(|p| total.merge(p));
        Ok(McEstimate { mean: total.mean(), stderr: total.stderr(), samples: 2 * pairs })
    }
}

/// Outer radius of the brute-force integral.
pub const ORACLE_R_MAX: f64 = 100.0;

fn radial_integral(u: &ScalarField, x: Point, w: Point, alpha: f64, eps: f64) -> f64 {
    let u0 = u.eval(x);
    let diff = |r: f64| 2.0 * u0 - u.eval([x[0] + r * w[0], x[1] + r * w[1]]) - u.eval([x[0] - r * w[0], x[1] - r * w[1]]);
    // D(ρ) = a ρ^2 + b ρ^4 + O(ρ^6) on [0, ε], fitted from ε and ε/2
    let (d1, d2) = (diff(eps), diff(0.5 * eps));
    let b = (d1 - 4.0 * d2) / (0.75 * eps.powi(4));
    let a = (d1 - b * eps.powi(4)) / (eps * eps);
    let inner = a * eps.powf(2.0 - alpha) / (2.0 - alpha) + b * eps.powf(4.0 - alpha) / (4.0 - alpha);
    let f = |r: f64| diff(r) * r.powf(-1.0 - alpha);
    let mut outer = 0.0;
    let cuts = [eps, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, ORACLE_R_MAX];
    for win in cuts.windows(2) {
        if win[1] > win[0] {
            outer += adaptive_gk(f, win[0], win[1], 1e-12, 1e-11, 2000).0;
        }
    }
    // beyond R_max only the 2u(x) term survives for decaying u
    let tail = 2.0 * u0 * ORACLE_R_MAX.powf(-alpha) / alpha;
    inner + outer + tail
}

fn oracle_at(u: &ScalarField, x: Point, d: usize, alpha: f64, eps: f64) -> Result<f64> {
    let c = riesz_constant(d, FracOrder::new(alpha)?)?;
    let s = match d {
        1 => radial_integral(u, x, [1.0, 0.0], alpha, eps),
        2 => adaptive_gk(|t| radial_integral(u, x, [t.cos(), t.sin()], alpha, eps), 0.0, PI, 1e-10, 1e-10, 200).0,
        _ => return Err(FracError::InvalidParameter(format!("oracle supports d = 1, 2, got {d}"))),
    };
    Ok(c * s)
}

/// `C(d,α) p.v.∫ (u(x) - u(y)) |x-y|^{-d-α} dy` by quadrature in polar
/// coordinates about `x`. Below `ε` the symmetric difference is replaced by
/// its fitted quadratic-plus-quartic Taylor form and integrated exactly;
/// beyond [`ORACLE_R_MAX`] `u` is taken to vanish. The result for `ε = 0.02`
/// and `ε = 0.01` must agree to `1e-4`, otherwise `u` is not smooth enough
/// near `x` and an error is returned.
pub fn oracle_riesz_pointwise(u: &ScalarField, x: Point, d: usize, alpha: f64) -> Result<f64> {
    let coarse = oracle_at(u, x, d, alpha, 0.02)?;
    let fine = oracle_at(u, x, d, alpha, 0.01)?;
    if (coarse - fine).abs() > 1e-4 * (1.0 + fine.abs()) {
        return Err(FracError::Domain(format!(
            "oracle Richardson check failed at ({}, {}): {coarse} vs {fine}",
            x[0], x[1]
        )));
    }
    Ok(fine)
}

/// A benchmark problem with a known solution.
#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub name: String,
    pub domain: Domain,
    pub alpha: f64,
    pub f: ScalarField,
    pub g: ScalarField,
    pub exact: ScalarField,
}

impl ReferenceCase {
    /// Builds the case and checks `(-Δ)^{α/2} exact = f` with the oracle at
    /// five interior probes to `1e-4`.
    pub fn verified(name: &str, domain: Domain, alpha: f64, f: ScalarField, g: ScalarField, exact: ScalarField, probes: [Point; 5]) -> Result<Self> {
        let d = domain.dim();
        for p in probes {
            let got = oracle_riesz_pointwise(&exact, p, d, alpha)?;
            let want = f.eval(p);
            if (got - want).abs() > 1e-4 * (1.0 + want.abs()) {
                return Err(FracError::Domain(format!("case {name}: oracle gives {got} at ({}, {}), f = {want}", p[0], p[1])));
            }
        }
        Ok(ReferenceCase { name: name.into(), domain, alpha, f, g, exact })
    }

    pub fn dyda(alpha: f64, variant: DydaVariant) -> Result<Self> {
        let (u, f) = dyda_pair(alpha, variant)?;
        let name = match variant {
            DydaVariant::One => "dyda-u1",
            DydaVariant::Two => "dyda-u2",
        };
        let probes = [[0.0, 0.0], [0.3, 0.0], [0.0, -0.5], [0.4, 0.4], [-0.6, 0.2]];
        Self::verified(name, Domain::disk(1.0)?, alpha, f, ScalarField::zero(), u, probes)
    }

    pub fn ball_constant(d: usize, alpha: f64) -> Result<Self> {
        let u = exact_ball_constant_f(d, alpha, 1.0, [0.0, 0.0])?;
        let (domain, probes) = if d == 1 {
            (Domain::interval(1.0)?, [[0.0, 0.0], [0.2, 0.0], [-0.4, 0.0], [0.5, 0.0], [-0.6, 0.0]])
        } else {
            (Domain::disk(1.0)?, [[0.0, 0.0], [0.3, 0.0], [0.0, -0.5], [0.4, 0.4], [-0.6, 0.2]])
        };
        Self::verified("ball-constant", domain, alpha, ScalarField::interior(|_| 1.0), ScalarField::zero(), u, probes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyda_constants() {
        let (_, f) = dyda_pair(1.0, DydaVariant::One).unwrap();
        assert!((f.eval([0.0, 0.0]) - PI / 2.0).abs() < 1e-14);
        let (_, f) = dyda_pair(1.5, DydaVariant::One).unwrap();
        assert!((f.eval([0.0, 0.0]) - 2.389_104_307_104_681_7).abs() < 1e-12);
        let (u, _) = dyda_pair(1.5, DydaVariant::Two).unwrap();
        assert_eq!(u.eval([0.0, 0.0]), 1.0);
        assert_eq!(u.eval([1.0, 0.0]), 0.0);
        // C^1 at the circle: slope of (1-ρ^2)^{1+α/2} vanishes
        for e in [1e-4, 1e-6] {
            let slope = u.eval([1.0 - e, 0.0]) / e;
            assert!((slope / (2f64.powf(1.75) * e.powf(0.75)) - 1.0).abs() < 1e-3, "{slope}");
        }
    }

    #[test]
    fn ball_solution_values() {
        let u = exact_ball_constant_f(2, 1.5, 1.0, [0.0, 0.0]).unwrap();
        assert!((u.eval([0.0, 0.0]) - 0.418_566_906_863_888_4).abs() < 1e-14);
        assert_eq!(u.eval([1.2, 0.0]), 0.0);
        let u = exact_ball_constant_f(1, 1.99, 1.0, [0.0, 0.0]).unwrap();
        assert!((u.eval([0.0, 0.0]) - 0.5).abs() < 0.01);
        // scaling: radius r multiplies by r^α
        let u2 = exact_ball_constant_f(2, 0.7, 2.0, [0.0, 0.0]).unwrap();
        let u1 = exact_ball_constant_f(2, 0.7, 1.0, [0.0, 0.0]).unwrap();
        assert!((u2.eval([0.6, 0.2]) - 2f64.powf(0.7) * u1.eval([0.3, 0.1])).abs() < 1e-14);
    }

    #[test]
    fn oracle_against_fourier_side() {
        // (1/2π) ∫ |ξ| √π e^{-ξ^2/4} dξ = 2/√π for exp(-x^2) at 0, α = 1
        let u = ScalarField::from_1d(|x| (-x * x).exp());
        let fourier = adaptive_gk(|xi| xi * PI.sqrt() * (-xi * xi / 4.0).exp(), 0.0, 40.0, 1e-14, 1e-14, 200).0 / PI;
        assert!((fourier - 2.0 / PI.sqrt()).abs() < 1e-12);
        let got = oracle_riesz_pointwise(&u, [0.0, 0.0], 1, 1.0).unwrap();
        assert!((got - fourier).abs() < 1e-6, "{got} vs {fourier}");
        assert_eq!(oracle_riesz_pointwise(&ScalarField::zero(), [0.3, 0.0], 2, 1.2).unwrap(), 0.0);
    }

    #[test]
    fn oracle_confirms_closed_forms() {
        let (u, f) = dyda_pair(1.5, DydaVariant::Two).unwrap();
        let got = oracle_riesz_pointwise(&u, [0.0, 0.0], 2, 1.5).unwrap();
        assert!((got - f.eval([0.0, 0.0])).abs() < 1e-4, "{got}");
        ReferenceCase::dyda(0.5, DydaVariant::Two).unwrap();
        ReferenceCase::dyda(1.5, DydaVariant::One).unwrap();
        ReferenceCase::ball_constant(1, 1.5).unwrap();
    }

    #[test]
    fn poisson_kernel_normalization() {
        let k = PoissonKernel::new(2, 1.0, 1.5).unwrap();
        let one = ScalarField::constant(1.0);
        let e = k.solution(&one, [0.0, 0.0], 1000, 1, Execution::Parallel).unwrap();
        assert!((e.mean - 1.0).abs() < 1e-14 && e.stderr < 1e-14);
        for x in [[0.5, 0.0], [0.2, -0.7], [0.0, 0.99]] {
            let e = k.solution(&one, x, 100_000, 2, Execution::Parallel).unwrap();
            assert!((e.mean - 1.0).abs() < 3.0 * e.stderr + 1e-12, "{x:?}: {e:?}");
        }
    }

    #[test]
    fn poisson_kernel_continuity_at_the_sphere() {
        let k = PoissonKernel::new(2, 1.0, 1.5).unwrap();
        let g = ScalarField::whole_space(|y| (-(y[0] * y[0] + y[1] * y[1])).exp());
        let e = k.solution(&g, [0.999, 0.0], 100_000, 3, Execution::Parallel).unwrap();
        assert!((e.mean - g.eval([1.001, 0.0])).abs() < 5e-2, "{e:?}");
    }

    #[test]
    fn poisson_kernel_is_thread_independent() {
        let k = PoissonKernel::new(2, 1.0, 0.5).unwrap();
        let g = ScalarField::whole_space(|y| (-(y[0] * y[0] + y[1] * y[1])).exp());
        let a = k.solution(&g, [0.3, 0.1], 10_000, 4, Execution::Parallel).unwrap();
        let b = k.solution(&g, [0.3, 0.1], 10_000, 4, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
