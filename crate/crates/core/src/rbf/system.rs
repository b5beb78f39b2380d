//! Collocation system, dense solve and evaluation of the expansion.

use crate::domain::Point;
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::par::{for_each_row, map_range, Execution};

use super::collocation::{CollocationSet, MultiquadricRBF};
use super::directional::DirectionalGL;
use super::lu::DenseLu;

/// Dense `(M+N) × (M+N)` system: GL rows for interior points, interpolation
/// rows for boundary points.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    /// Row-major.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
    pub points: Vec<Point>,
    pub m: usize,
    pub rbf: MultiquadricRBF,
}

impl CollocationSystem {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim() + j]
    }

    /// `A λ`.
    pub fn apply(&self, lambda: &[f64]) -> Vec<f64> {
        self.matrix.chunks(self.dim()).map(|r| r.iter().zip(lambda).map(|(a, b)| a * b).sum()).collect()
    }
}

/// `row[j] += w √((px - xs[j])^2 + (py - ys[j])^2 + c2)`. Assembly time is
/// almost all spent here and is bound by square-root throughput.
#[inline]
fn accumulate(row: &mut [f64], xs: &[f64], ys: &[f64], px: f64, py: f64, c2: f64, w: f64) {
    let n = row.len();
    let (xs, ys) = (&xs[..n], &ys[..n]);
    for j in 0..n {
        let dx = px - xs[j];
        let dy = py - ys[j];
        row[j] += w * (dx * dx + dy * dy + c2).sqrt();
    }
}

/// One interior row: `C h^{-α} Σ_l w_l Σ_{k<=K1} c_k φ(|x - khθ_l - x_j|)`.
fn gl_row(op: &DirectionalGL, rbf: &MultiquadricRBF, x: Point, xs: &[f64], ys: &[f64], row: &mut [f64]) -> Result<()> {
    let c2 = rbf.c * rbf.c;
    let h = op.scheme.h;
    let coeffs = op.coefficients();
    row.fill(0.0);
    for (&theta, &w) in op.quad.directions.iter().zip(&op.quad.weights) {
        for (a, b) in op.interior_ranges(x, theta)? {
            for (k, &ck) in coeffs.iter().enumerate().take(b).skip(a) {
                let s = k as f64 * h;
                let (px, py) = (x[0] - s * theta[0], x[1] - s * theta[1]);
                let cw = w * ck;
                accumulate(row, xs, ys, px, py, c2, cw);
            }
        }
    }
    let scale = op.constant() * op.scale();
    row.iter_mut().for_each(|r| *r *= scale);
    Ok(())
}

/// Assembles the matrix and right-hand side. `f` is sampled at interior
/// points; `g` must be a whole-space field.
pub fn assemble(
    colloc: &CollocationSet,
    rbf: &MultiquadricRBF,
    op: &DirectionalGL,
    f: &ScalarField,
    g: &ScalarField,
    exec: Execution,
) -> Result<CollocationSystem> {
    let points = colloc.points();
    let n = points.len();
    let m = colloc.m();
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    let mut matrix = vec![0.0; n * n];
    let failures = std::sync::Mutex::new(None);
    for_each_row(exec, &mut matrix, n, |i, row| {
        if i < m {
            if let Err(e) = gl_row(op, rbf, points[i], &xs, &ys, row) {
                failures.lock().expect("no panics while holding").get_or_insert(e);
            }
        } else {
            for (r, &p) in row.iter_mut().zip(&points) {
                *r = rbf.phi_between(points[i], p);
            }
        }
    });
    if let Some(e) = failures.into_inner().expect("no panics while holding") {
        return Err(e);
    }
    let rhs = assemble_rhs(colloc, op, f, g, exec)?;
    Ok(CollocationSystem { matrix, rhs, points, m, rbf: *rbf })
}

/// Right-hand side alone: `f(x_i) - C Σ_l w_l (exterior sum)` on interior
/// rows and `g(x_i)` on boundary rows. The matrix does not depend on `f`,
/// `g` or `K2`, so this is all that changes between such runs.
pub fn assemble_rhs(colloc: &CollocationSet, op: &DirectionalGL, f: &ScalarField, g: &ScalarField, exec: Execution) -> Result<Vec<f64>> {
    if g.support == crate::field::Support::Interior && !g.is_known_zero() {
        return Err(FracError::InvalidParameter("exterior data must be a whole-space field".into()));
    }
    let points = colloc.points();
    let m = colloc.m();
    map_range(exec, points.len(), |i| {
        let x = points[i];
        if i >= m {
            return Ok(g.eval(x));
        }
        let mut ext = 0.0;
        if !g.is_known_zero() {
            for (&theta, &w) in op.quad.directions.iter().zip(&op.quad.weights) {
                ext += w * op.gl_exterior_correction(g, x, theta)?;
            }
        }
        Ok(f.eval(x) - op.constant() * ext)
    })
    .into_iter()
    .collect()
}

/// Coefficients and solver diagnostics.
#[derive(Debug, Clone)]
pub struct RbfSolution {
    pub coeffs: Vec<f64>,
    pub centers: Vec<Point>,
    pub rbf: MultiquadricRBF,
    /// 1-norm condition estimate of the collocation matrix.
    pub condition: f64,
    /// `‖Aλ - b‖_2 / ‖b‖_2` (absolute when `b = 0`).
    pub residual: f64,
}

impl RbfSolution {
    pub fn eval(&self, x: Point) -> f64 {
        self.coeffs.iter().zip(&self.centers).map(|(l, &c)| l * self.rbf.phi_between(x, c)).sum()
    }

    pub fn evaluate(&self, points: &[Point]) -> Vec<f64> {
        evaluate(&self.coeffs, &self.rbf, &self.centers, points)
    }
}

/// `u(x) = Σ_j λ_j φ(|x - x_j|)` at each point.
pub fn evaluate(coeffs: &[f64], rbf: &MultiquadricRBF, centers: &[Point], points: &[Point]) -> Vec<f64> {
    points
        .iter()
        .map(|&x| coeffs.iter().zip(centers).map(|(l, &c)| l * rbf.phi_between(x, c)).sum())
        .collect()
}

/// A factored system, reusable for several right-hand sides.
#[derive(Debug, Clone)]
pub struct FactoredSystem {
    lu: DenseLu,
    pub condition: f64,
}

impl FactoredSystem {
    pub fn new(sys: &CollocationSystem) -> Result<Self> {
        let lu = DenseLu::factor(sys.matrix.clone(), sys.dim())?;
        let condition = lu.condition_estimate();
        Ok(FactoredSystem { lu, condition })
    }

    pub fn solve(&self, sys: &CollocationSystem, rhs: &[f64]) -> RbfSolution {
        let coeffs = self.lu.solve(rhs);
        let r: f64 = sys.apply(&coeffs).iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        RbfSolution {
            coeffs,
            centers: sys.points.clone(),
            rbf: sys.rbf,
            condition: self.condition,
            residual: if b > 0.0 { r / b } else { r },
        }
    }
}

/// LU with partial pivoting; a pivot below `1e-300` is a singular-matrix error.
pub fn solve_system(sys: &CollocationSystem) -> Result<RbfSolution> {
    Ok(FactoredSystem::new(sys)?.solve(sys, &sys.rhs))
}
