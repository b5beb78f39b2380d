//! Expected occupation measure `V_1(0, dy)` of the stable process before it
//! leaves the unit ball:
//!
//! `V_1(0, dy) = 2^{-α} π^{-d/2} Γ(d/2) / Γ(α/2)^2 |y|^{α-d} F(|y|) dy`,
//! `F(r) = ∫_0^{r^{-2}-1} (u+1)^{-d/2} u^{α/2-1} du`.
//!
//! With `w = u/(1+u)`, `F(r) = B_{1-r^2}(α/2, (d-α)/2)`, an incomplete Beta
//! integral. The radial marginal is tabulated once and inverted for sampling.

use super::rng::StableRng;
use crate::constants::occupation_mass;
use crate::domain::Point;
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::quadrature::GaussLegendre;
use crate::special::{beta, beta_inc, gamma};
use std::f64::consts::PI;

/// Unregularized `B_x(a, b) = ∫_0^x t^{a-1} (1-t)^{b-1} dt` for `a > 0`,
/// `b > -1`, given `x` and `y = 1 - x`.
fn beta_lower(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if b > 0.0 {
        return Ok(beta(a, b)? * beta_inc(a, b, x.min(1.0))?);
    }
    if b == 0.0 {
        if a == 0.5 {
            // 2 artanh(√x) with 1 - √x = y / (1 + √x)
            let s = x.sqrt();
            return Ok(((1.0 + s) * (1.0 + s) / y).ln());
        }
        return Err(FracError::Domain(format!("incomplete beta with b = 0, a = {a}")));
    }
    if b <= -1.0 {
        return Err(FracError::Domain(format!("incomplete beta with b = {b}")));
    }
    // (a+b) B_x(a, b+1) - b B_x(a, b) = x^a (1-x)^b
    Ok(((a + b) * beta_lower(a, b + 1.0, x, y)? - x.powf(a) * y.powf(b)) / b)
}

/// Radial density of `V_1(0, ·)` at `|y| = r ∈ (0, 1)`, including the
/// surface factor.
pub fn occupation_radial_density(d: usize, alpha: f64, r: f64) -> Result<f64> {
    // below 1e-100 the mass is negligible and r^2 underflows
    if !(r > 1e-100 && r < 1.0) {
        return Ok(0.0);
    }
    let dh = d as f64 / 2.0;
    let c = 2f64.powf(-alpha) * PI.powf(-dh) * gamma(dh)? / gamma(alpha / 2.0)?.powi(2);
    let surface = if d == 1 { 2.0 } else { 2.0 * PI };
    let f = beta_lower(alpha / 2.0, (d as f64 - alpha) / 2.0, (1.0 - r) * (1.0 + r), r * r)?;
    Ok(surface * c * r.powf(alpha - 1.0) * f)
}

/// Inverse-CDF sampler of the radius under `V_1(0, ·)`, normalized.
#[derive(Debug, Clone)]
pub struct OccupationTable {
    pub d: usize,
    pub alpha: f64,
    /// `∫ V_1(0, dy)` from the table; agrees with [`occupation_mass`].
    pub mass: f64,
    /// Nodes are uniform in `t = r^{1/q}`.
    exponent: f64,
    cdf: Vec<f64>,
}

impl OccupationTable {
    pub const CELLS: usize = 2048;

    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(FracError::Unsupported(format!("occupation measure in dimension {d}")));
        }
        // Near r = 0 the CDF grows like r^α (d = 2) or r^{min(α,1)} (d = 1).
        // Nodes uniform in t with r = t^q make it grow like t^3 there.
        let e = if d == 2 { alpha } else { alpha.min(1.0) };
        let q = 3.0 / e;
        let gl = GaussLegendre::new(8);
        let n = Self::CELLS;
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let (t0, t1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            let (nodes, weights) = gl.mapped(t0, t1);
            for (t, w) in nodes.into_iter().zip(weights) {
                let r = t.powf(q);
                acc += w * occupation_radial_density(d, alpha, r)? * q * t.powf(q - 1.0);
            }
            cdf.push(acc);
        }
        let exact = occupation_mass(d, alpha)?;
        if ((acc - exact) / exact).abs() > 1e-6 {
            return Err(FracError::Domain(format!(
                "occupation table mass {acc} disagrees with the closed form {exact}"
            )));
        }
        Ok(OccupationTable { d, alpha, mass: exact, exponent: q, cdf })
    }

    /// Radius with law `V_1(0, ·)/mass`.
    pub fn sample_radius(&self, rng: &mut StableRng) -> f64 {
        let total = *self.cdf.last().expect("non-empty");
        let u = rng.uniform() * total;
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, Self::CELLS) - 1;
        let (c0, c1) = (self.cdf[i], self.cdf[i + 1]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        ((i as f64 + t) / Self::CELLS as f64).powf(self.exponent)
    }

    /// Monte Carlo estimate of `∫_{|y|<1} f(center + radius y) V_1(0, dy)`
    /// with `m` samples.
    pub fn integral(&self, f: &ScalarField, center: Point, radius: f64, rng: &mut StableRng, m: usize) -> f64 {
        let mut s = 0.0;
        for _ in 0..m {
            let r = radius * self.sample_radius(rng);
            let e = rng.direction(self.d);
            s += f.eval([center[0] + r * e[0], center[1] + r * e[1]]);
        }
        self.mass * s / m as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tanh_sinh;
    use crate::stats::Welford;

    #[test]
    fn density_integrates_to_mass() {
        for d in [1usize, 2] {
            for a in [0.3, 0.5, 1.0, 1.5, 1.9] {
                let total = tanh_sinh(|r, _, _| occupation_radial_density(d, a, r).unwrap(), 0.0, 1.0, 1.0 / 128.0, 6.0);
                let exact = occupation_mass(d, a).unwrap();
                assert!(((total - exact) / exact).abs() < 1e-6, "d={d} α={a}: {total} vs {exact}");
                OccupationTable::new(d, a).unwrap();
            }
        }
    }

    #[test]
    fn known_masses() {
        assert!((occupation_mass(2, 1.5).unwrap() - 0.418_566_906_863_888_4).abs() < 1e-14);
        assert!((occupation_mass(2, 2.0).unwrap() - 0.25).abs() < 1e-14);
    }

    fn estimate(f: ScalarField, m: usize) -> Welford {
        let t = OccupationTable::new(2, 1.5).unwrap();
        let mut w = Welford::default();
        for k in 0..m {
            let mut rng = StableRng::new(9, k as u64);
            w.push(t.integral(&f, [0.3, -0.2], 0.5, &mut rng, 1));
        }
        w
    }

    #[test]
    fn constant_and_odd_integrands() {
        let w = estimate(ScalarField::constant(1.0), 1000);
        assert!((w.mean() - occupation_mass(2, 1.5).unwrap()).abs() < 1e-14);
        let w = estimate(ScalarField::whole_space(|x| x[0] - 0.3), 10_000);
        assert!(w.mean().abs() < 3.0 * w.stderr());
    }

    #[test]
    fn second_moment_matches_quadrature() {
        let a = 1.5;
        let exact = tanh_sinh(|r, _, _| r * r * occupation_radial_density(2, a, r).unwrap(), 0.0, 1.0, 1.0 / 128.0, 6.0);
        let w = estimate(ScalarField::whole_space(|x| ((x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2)) / 0.25), 10_000);
        assert!((w.mean() - exact).abs() < 3.0 * w.stderr(), "{} vs {exact}", w.mean());
    }
}
