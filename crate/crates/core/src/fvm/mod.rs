//! Finite volumes for the one-dimensional horizon operator
//!
//! `-L_δ u(x) = C_α p.v. ∫_{|y-x|<δ} (u(x) - u(y)) / |x-y|^{1+α} dy`
//!
//! on `(-L/2, L/2)` with `u = 0` outside, and for its Riesz limit `δ = ∞`
//! where interactions beyond the domain length are integrated exactly.
//! Unknowns are cell averages; the inner integral uses the right rectangle
//! rule, which gives a symmetric Toeplitz system `C_α h^{-α} S U = F`. The
//! rule skips the singular part of the integrand near `z = 0`, so interior
//! values carry an `O(h^{2-α})` bias.

mod study;
mod toeplitz;

pub use study::{convergence_study, horizon_study, ConvergenceRow, HorizonRow, HorizonStudy, Norm, StudyTable};
pub use toeplitz::{banded_lu_solve, pcg, CgReport, SymToeplitz};

use crate::constants::c_alpha_1d;
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::order::FracOrder;
use crate::quadrature::GaussLegendre;

/// Uniform cell grid on `(-l_half, l_half)` with an interaction horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FVGrid {
    pub l_half: f64,
    pub n: usize,
    pub h: f64,
    /// `K h` after snapping, or infinity.
    pub delta: f64,
    /// Horizon requested before snapping to a grid multiple.
    pub delta_requested: f64,
    /// Horizon in cells; `None` for the infinite horizon.
    pub k: Option<usize>,
}

impl FVGrid {
    /// `delta = f64::INFINITY` selects the Riesz limit.
    pub fn new(l_half: f64, n: usize, delta: f64) -> Result<Self> {
        if !(l_half > 0.0 && l_half.is_finite()) {
            return Err(FracError::InvalidParameter(format!("half-width must be positive, got {l_half}")));
        }
        if n < 2 {
            return Err(FracError::InvalidParameter(format!("need at least 2 cells, got {n}")));
        }
        if !(delta > 0.0) {
            return Err(FracError::InvalidParameter(format!("horizon must be positive, got {delta}")));
        }
        let h = 2.0 * l_half / n as f64;
        let (k, snapped) = if delta.is_infinite() {
            (None, delta)
        } else {
            let k = (delta / h).round().max(1.0) as usize;
            (Some(k), k as f64 * h)
        };
        Ok(FVGrid { l_half, n, h, delta: snapped, delta_requested: delta, k })
    }

    pub fn is_riesz(&self) -> bool {
        self.k.is_none()
    }

    /// `delta - delta_requested`.
    pub fn snap(&self) -> f64 {
        if self.is_riesz() {
            0.0
        } else {
            self.delta - self.delta_requested
        }
    }

    pub fn center(&self, j: usize) -> f64 {
        -self.l_half + (j as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }

    /// Averages over each cell by 4-point Gauss.
    pub fn cell_averages(&self, f: &ScalarField) -> Vec<f64> {
        let gl = GaussLegendre::new(4);
        (0..self.n)
            .map(|j| {
                let a = -self.l_half + j as f64 * self.h;
                gl.integrate(a, a + self.h, |x| f.eval_1d(x)) / self.h
            })
            .collect()
    }
}

/// `C_α h^{-α} S` with dimensionless Toeplitz `S`.
#[derive(Debug, Clone)]
pub struct ToeplitzStiffness {
    pub alpha: FracOrder,
    /// `t_0 .. t_{N-1}`: `Σ_{k≤K} 2/k^{1+α}` and `-1/k^{1+α}` within the horizon.
    pub first_row: Vec<f64>,
    /// `(2/α)(h/L)^α` with `L = 2 l_half` in Riesz mode, otherwise 0.
    pub tail_diagonal: f64,
    /// `C_α h^{-α}`.
    pub scale: f64,
    matrix: SymToeplitz,
}

impl ToeplitzStiffness {
    pub fn matrix(&self) -> &SymToeplitz {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.first_row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_row.is_empty()
    }

    /// Dimensionless entry `S_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.entry(i, j)
    }

    /// `C_α h^{-α} S u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.matrix.matvec(u).into_iter().map(|v| v * self.scale).collect()
    }

    /// Rows where `S_jj - Σ_{i≠j} |S_ji|` is negative (none for a valid assembly).
    pub fn dominance_violations(&self) -> Vec<usize> {
        let n = self.len();
        let b = self.matrix.bandwidth();
        (0..n)
            .filter(|&j| {
                let lo = j.saturating_sub(b);
                let hi = (j + b).min(n - 1);
                let off: f64 = (lo..=hi).filter(|&i| i != j).map(|i| self.entry(j, i).abs()).sum();
                self.entry(j, j) - off < -1e-12 * self.entry(j, j)
            })
            .collect()
    }
}

/// Sum of `k^{-p}` for `k = 1..=m`, smallest terms first.
fn power_sum(m: usize, p: f64) -> f64 {
    (1..=m).rev().map(|k| (k as f64).powf(-p)).sum()
}

/// Assembles the stiffness. `riesz_mode` must agree with an infinite horizon.
pub fn assemble(grid: &FVGrid, alpha: FracOrder, riesz_mode: bool) -> Result<ToeplitzStiffness> {
    if riesz_mode != grid.is_riesz() {
        return Err(FracError::InvalidParameter(if riesz_mode {
            format!("Riesz mode needs an infinite horizon, got delta = {}", grid.delta)
        } else {
            "an infinite horizon needs Riesz mode".into()
        }));
    }
    let a = alpha.value();
    let n = grid.n;
    let p = 1.0 + a;
    // Riesz mode: band up to the domain length L = N h, tail beyond it exact
    let k = grid.k.unwrap_or(n);
    let mut row = vec![0.0; n];
    row[0] = 2.0 * power_sum(k, p);
    for (j, r) in row.iter_mut().enumerate().take(k.min(n - 1) + 1).skip(1) {
        *r = -(j as f64).powf(-p);
    }
    let tail = if riesz_mode { (2.0 / a) * (1.0 / n as f64).powf(a) } else { 0.0 };
    let matrix = SymToeplitz::new(row.clone(), tail);
    Ok(ToeplitzStiffness {
        alpha,
        first_row: row,
        tail_diagonal: tail,
        scale: c_alpha_1d(alpha) * grid.h.powf(-a),
        matrix,
    })
}

/// Linear solver backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Preconditioned CG with FFT products.
    #[default]
    Fast,
    /// Banded LU.
    Direct,
}

#[derive(Debug, Clone)]
pub struct FVSolution {
    pub grid: FVGrid,
    pub averages: Vec<f64>,
    pub cg: Option<CgReport>,
    pub warnings: Vec<String>,
}

impl FVSolution {
    /// Linear interpolation between cell centres, reaching 0 at the ends of
    /// the domain; 0 outside. Symmetric data gives a symmetric profile, which
    /// picking one cell at a face would not.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x.abs() >= g.l_half {
            return 0.0;
        }
        let s = (x + g.l_half) / g.h - 0.5;
        if s <= 0.0 {
            return self.averages[0] * (1.0 + 2.0 * s);
        }
        let j = s.floor() as usize;
        if j + 1 >= g.n {
            return self.averages[g.n - 1] * (1.0 - 2.0 * (s - (g.n - 1) as f64));
        }
        let t = s - j as f64;
        (1.0 - t) * self.averages[j] + t * self.averages[j + 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.averages.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solves `C_α h^{-α} S U = F` for cell averages of `f`.
pub fn solve(s: &ToeplitzStiffness, f: &ScalarField, grid: &FVGrid, backend: Backend) -> Result<FVSolution> {
    if s.len() != grid.n {
        return Err(FracError::InvalidParameter(format!(
            "stiffness has {} rows but the grid has {} cells",
            s.len(),
            grid.n
        )));
    }
    let rhs: Vec<f64> = grid.cell_averages(f).into_iter().map(|v| v / s.scale).collect();
    let mut warnings = Vec::new();
    let (averages, cg) = match backend {
        Backend::Direct => (banded_lu_solve(s.matrix(), &rhs)?, None),
        Backend::Fast => {
            let (x, rep) = pcg(s.matrix(), &rhs, 1e-12, 10 * grid.n);
            if rep.converged {
                (x, Some(rep))
            } else {
                warnings.push(format!(
                    "CG stopped at relative residual {:.3e} after {} iterations; used the direct solver",
                    rep.relative_residual, rep.iterations
                ));
                (banded_lu_solve(s.matrix(), &rhs)?, Some(rep))
            }
        }
    };
    if grid.snap() != 0.0 {
        warnings.push(format!("horizon {} snapped to {} = {} h", grid.delta_requested, grid.delta, grid.k.unwrap_or(0)));
    }
    Ok(FVSolution { grid: grid.clone(), averages, cg, warnings })
}

/// Grid, assembly and fast solve in one call.
pub fn solve_problem(alpha: FracOrder, l_half: f64, n: usize, delta: f64, f: &ScalarField) -> Result<FVSolution> {
    let grid = FVGrid::new(l_half, n, delta)?;
    let s = assemble(&grid, alpha, grid.is_riesz())?;
    solve(&s, f, &grid, Backend::Fast)
}
