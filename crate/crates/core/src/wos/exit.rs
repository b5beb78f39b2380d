//! Exit position of an isotropic α-stable process started at the centre of
//! the unit ball. The density on `|y| > 1` is
//!
//! `π^{-(d/2+1)} Γ(d/2) sin(πα/2) (|y|^2 - 1)^{-α/2} |y|^{-d}`.
//!
//! In the radius it is proportional to `(ρ^2 - 1)^{-α/2} ρ^{-1}`; the change
//! of variables `v = (ρ^2 - 1)/ρ^2` turns this into `v^{-α/2} (1-v)^{α/2-1}`,
//! a Beta(1 - α/2, α/2) law, so `ρ = (1 - V)^{-1/2}` samples it exactly.

use super::rng::{sample_beta, StableRng};
use crate::domain::Point;
use crate::error::Result;
use crate::special::{beta_inc, gamma};
use std::f64::consts::PI;

/// Radius of the exit point, `ρ > 1`.
pub fn sample_exit_radius(rng: &mut StableRng, alpha: f64) -> f64 {
    let (_, one_minus_v) = sample_beta(rng, 1.0 - 0.5 * alpha, 0.5 * alpha);
    1.0 / one_minus_v.sqrt()
}

/// Exit point from the unit ball in dimension `d ∈ {1, 2}`.
pub fn sample_exit_unit_ball(rng: &mut StableRng, d: usize, alpha: f64) -> Point {
    let rho = sample_exit_radius(rng, alpha);
    let e = rng.direction(d);
    [rho * e[0], rho * e[1]]
}

/// `P(ρ <= r)` for the exit radius.
pub fn exit_radius_cdf(alpha: f64, r: f64) -> Result<f64> {
    if r <= 1.0 {
        return Ok(0.0);
    }
    beta_inc(1.0 - 0.5 * alpha, 0.5 * alpha, 1.0 - 1.0 / (r * r))
}

/// Exit density at `|y| = r > 1` in dimension `d`.
pub fn exit_density(d: usize, alpha: f64, r: f64) -> Result<f64> {
    exit_density_gap(d, alpha, r - 1.0)
}

/// Exit density at `|y| = 1 + gap`, accurate for tiny gaps.
pub fn exit_density_gap(d: usize, alpha: f64, gap: f64) -> Result<f64> {
    let dh = d as f64 / 2.0;
    let c = PI.powf(-(dh + 1.0)) * gamma(dh)? * (PI * alpha / 2.0).sin();
    let r = 1.0 + gap;
    Ok(c * (gap * (r + 1.0)).powf(-alpha / 2.0) * r.powf(-(d as f64)))
}
