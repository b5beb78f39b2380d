//! Normalization constants of the integral and directional representations.

use crate::error::Result;
use crate::order::FracOrder;
use crate::special::{gamma, log_gamma};
use std::f64::consts::PI;

fn check_dim(d: usize) -> Result<f64> {
    match d {
        1 | 2 => Ok(d as f64),
        _ => crate::error::invalid(format!("dimension must be 1 or 2, got {d}")),
    }
}

/// `C(d, α) = 2^α Γ((α+d)/2) / (π^{d/2} |Γ(-α/2)|)`.
pub fn riesz_constant(d: usize, alpha: FracOrder) -> Result<f64> {
    let dd = check_dim(d)?;
    let a = alpha.value();
    Ok(2f64.powf(a) * gamma(0.5 * (a + dd))? / (PI.powf(0.5 * dd) * gamma(-0.5 * a)?.abs()))
}

/// Constant of the one-dimensional horizon operator,
/// `2^α α Γ((α+1)/2) / (2 √π Γ(1-α/2))`.
pub fn c_alpha_1d(alpha: FracOrder) -> f64 {
    let a = alpha.value();
    let num = 2f64.powf(a) * a * gamma(0.5 * (a + 1.0)).expect("finite argument");
    let den = 2.0 * PI.sqrt() * gamma(1.0 - 0.5 * a).expect("finite argument");
    num / den
}

/// `C_{α,d} = Γ((1-α)/2) Γ((d+α)/2) / (2 π^{(1+d)/2})`; negative for `α > 1`.
pub fn directional_constant(d: usize, alpha: FracOrder) -> Result<f64> {
    let dd = check_dim(d)?;
    let a = alpha.require_directional()?.value();
    Ok(gamma(0.5 * (1.0 - a))? * gamma(0.5 * (dd + a))? / (2.0 * PI.powf(0.5 * (1.0 + dd))))
}

/// Mass of the expected occupation measure of the unit ball started at its centre,
/// `2^{-α} Γ(d/2) / (Γ((d+α)/2) Γ(1+α/2))`. This is also the value at the centre of
/// the solution with `f = 1` and zero exterior data.
pub fn occupation_mass(d: usize, alpha: f64) -> Result<f64> {
    let dd = check_dim(d)?;
    let ln = -alpha * 2f64.ln() + log_gamma(0.5 * dd)?
        - log_gamma(0.5 * (dd + alpha))?
        - log_gamma(1.0 + 0.5 * alpha)?;
    Ok(ln.exp())
}
