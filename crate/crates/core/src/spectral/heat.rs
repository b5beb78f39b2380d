//! Heat-semigroup form of the inhomogeneous spectral operator:
//!
//! `(-Δ_{Ω,g})^{α/2} u = Γ(-α/2)^{-1} ∫_0^∞ (e^{tΔ}(u - z) - (u - z)) t^{-1-α/2} dt`
//!
//! with `z` the harmonic lift of `g`. The time integral is discretized by a
//! rule `Σ_j β_j (w(t_j) - w(0))`; the propagated field `w` is computed
//! exactly per eigenmode or by forward Euler.

use super::lifting::{harmonic_lift, project_minus_lift};
use super::{EigenBasis, SpectralCoeffs};
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::order::FracOrder;
use crate::quadrature::GaussLegendre;
use crate::special::gamma;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagation {
    EigenExact,
    ForwardEuler { dt: f64 },
}

/// Placement of the time nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeGrid {
    /// `nt` bins uniform in `ln t` between `10^{-8}/λ_max` and `T`, three Gauss
    /// points per bin, with analytic head and tail corrections.
    #[default]
    LogGraded,
    /// `nt` uniform bins on `[0, T]` with midpoint nodes and exact bin weights
    /// `∫ t^{-1-α/2} dt`; the first bin uses the linear behaviour of `w` at 0
    /// and the tail beyond `T` is dropped.
    UniformMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSGConfig {
    pub t_final: f64,
    pub nt: usize,
    pub propagation: Propagation,
    pub grid: TimeGrid,
}

impl HeatSGConfig {
    pub fn new(t_final: f64, nt: usize) -> Result<Self> {
        let cfg = HeatSGConfig { t_final, nt, propagation: Propagation::EigenExact, grid: TimeGrid::LogGraded };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_euler(mut self, dt: f64) -> Result<Self> {
        self.propagation = Propagation::ForwardEuler { dt };
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid(mut self, grid: TimeGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(FracError::InvalidParameter(format!("T must be positive, got {}", self.t_final)));
        }
        if self.nt == 0 {
            return Err(FracError::InvalidParameter("Nt must be at least 1".into()));
        }
        if let Propagation::ForwardEuler { dt } = self.propagation {
            if !(dt > 0.0) || dt > self.t_final / self.nt as f64 {
                return Err(FracError::InvalidParameter(format!(
                    "Euler step must satisfy 0 < dt <= T/Nt = {}, got {dt}",
                    self.t_final / self.nt as f64
                )));
            }
        }
        Ok(())
    }
}

/// Result of the heat-semigroup application.
#[derive(Debug, Clone)]
pub struct HeatSgOutput {
    pub coeffs: SpectralCoeffs,
    /// `|Γ(-α/2)|^{-1} ∫_T^∞ t^{-1-α/2} dt`.
    pub tail_weight: f64,
    pub warnings: Vec<String>,
}

/// Time nodes and weights (already divided by `Γ(-α/2)`).
pub fn time_rule(alpha: FracOrder, cfg: &HeatSGConfig, lambda_max: f64) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let a2 = alpha.half();
    let g = gamma(-a2)?;
    let big_t = cfg.t_final;
    let mut rule = Vec::new();
    match cfg.grid {
        TimeGrid::LogGraded => {
            let t_min = 1e-8 / lambda_max;
            if t_min >= big_t {
                return Err(FracError::InvalidParameter(format!(
                    "T = {big_t} is below the smallest resolved time {t_min}"
                )));
            }
            let gl = GaussLegendre::new(3);
            let (s0, s1) = (t_min.ln(), big_t.ln());
            let ds = (s1 - s0) / cfg.nt as f64;
            for j in 0..cfg.nt {
                let a = s0 + j as f64 * ds;
                let (nodes, weights) = gl.mapped(a, a + ds);
                for (s, w) in nodes.into_iter().zip(weights) {
                    rule.push((s.exp(), w * (-a2 * s).exp() / g));
                }
            }
            rule.push((t_min, t_min.powf(-a2) / (1.0 - a2) / g));
            rule.push((big_t, big_t.powf(-a2) / a2 / g));
        }
        TimeGrid::UniformMidpoint => {
            let dt = big_t / cfg.nt as f64;
            for j in 0..cfg.nt {
                let (lo, hi) = (j as f64 * dt, (j + 1) as f64 * dt);
                let t = 0.5 * (lo + hi);
                let w = if j == 0 {
                    hi.powf(1.0 - a2) / (1.0 - a2) / t
                } else {
                    (lo.powf(-a2) - hi.powf(-a2)) / a2
                };
                rule.push((t, w / g));
            }
        }
    }
    rule.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(rule)
}

/// `w(t)/w(0) - 1` for a mode with eigenvalue `l` at each rule time, formed
/// without cancellation for `l t << 1`.
fn amplification_m1(l: f64, times: &[f64], prop: Propagation) -> Vec<f64> {
    match prop {
        Propagation::EigenExact => times.iter().map(|&t| (-l * t).exp_m1()).collect(),
        Propagation::ForwardEuler { dt } => {
            let mut amp = SignedLog { log_mag: 0.0, negative: false };
            let mut now = 0.0;
            times
                .iter()
                .map(|&t| {
                    let span = t - now;
                    let full = (span / dt).floor();
                    amp.times_one_minus(l * dt, full);
                    amp.times_one_minus(l * (span - full * dt), 1.0);
                    now = t;
                    amp.minus_one()
                })
                .collect()
        }
    }
}

/// Product of factors `1 - x` kept as sign and log-magnitude.
struct SignedLog {
    log_mag: f64,
    negative: bool,
}

impl SignedLog {
    fn times_one_minus(&mut self, x: f64, count: f64) {
        if count == 0.0 {
            return;
        }
        if x < 1.0 {
            self.log_mag += count * (-x).ln_1p();
        } else {
            self.log_mag += count * (x - 1.0).ln();
            if count % 2.0 == 1.0 {
                self.negative = !self.negative;
            }
        }
    }

    fn minus_one(&self) -> f64 {
        if self.negative {
            -self.log_mag.exp() - 1.0
        } else {
            self.log_mag.exp_m1()
        }
    }
}

/// Multiplier replacing `λ^{α/2}` under the discretized time integral.
pub fn heat_multiplier(l: f64, rule: &[(f64, f64)], prop: Propagation) -> f64 {
    let times: Vec<f64> = rule.iter().map(|p| p.0).collect();
    amplification_m1(l, &times, prop).iter().zip(rule).map(|(a, (_, w))| w * a).sum()
}

/// Applies `(-Δ_{Ω,g})^{α/2}` to `u` through the heat semigroup.
pub fn apply_fraclap_heatsg(
    u: &ScalarField,
    g: &ScalarField,
    basis: &Arc<EigenBasis>,
    cfg: &HeatSGConfig,
    alpha: FracOrder,
) -> Result<HeatSgOutput> {
    let lambdas = basis.eigenvalues();
    let lmax = lambdas.iter().copied().fold(0.0, f64::max);
    let lmin = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    if let Propagation::ForwardEuler { dt } = cfg.propagation {
        if lmax * dt >= 2.0 {
            return Err(FracError::InvalidParameter(format!(
                "forward Euler is unstable: dt λ_max = {} >= 2",
                lmax * dt
            )));
        }
    }
    let rule = time_rule(alpha, cfg, lmax)?;
    let a2 = alpha.half();
    let tail_weight = cfg.t_final.powf(-a2) / a2 / gamma(-a2)?.abs();
    let mut warnings = Vec::new();
    match cfg.grid {
        TimeGrid::UniformMidpoint if tail_weight > 1e-6 => warnings.push(format!(
            "dropped tail weight {tail_weight:.3e} beyond T = {}",
            cfg.t_final
        )),
        TimeGrid::LogGraded if (-lmin * cfg.t_final).exp() > 1e-6 => warnings.push(format!(
            "slowest mode has not decayed by T: exp(-λ_1 T) = {:.3e}",
            (-lmin * cfg.t_final).exp()
        )),
        _ => {}
    }
    let lift = harmonic_lift(g, basis.domain())?;
    let c = project_minus_lift(basis, u, &lift);
    let coeffs = c
        .iter()
        .zip(lambdas)
        .map(|(&c, &l)| c * heat_multiplier(l, &rule, cfg.propagation))
        .collect();
    Ok(HeatSgOutput { coeffs: SpectralCoeffs { basis: basis.clone(), coeffs }, tail_weight, warnings })
}
