//! Symmetric Toeplitz algebra: FFT matvec by circulant embedding, a circulant
//! preconditioner, preconditioned CG, and a banded LU reference solver.

use crate::error::{FracError, Result};
use crate::par::{map_range, Execution};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Symmetric Toeplitz matrix given by its first row, plus a constant added
/// to the diagonal.
#[derive(Clone)]
pub struct SymToeplitz {
    row: Vec<f64>,
    diag_shift: f64,
    fft2: Arc<dyn Fft<f64>>,
    ifft2: Arc<dyn Fft<f64>>,
    embed: Vec<Complex<f64>>,
}

impl std::fmt::Debug for SymToeplitz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymToeplitz")
            .field("n", &self.row.len())
            .field("diag_shift", &self.diag_shift)
            .finish()
    }
}

impl SymToeplitz {
    pub fn new(row: Vec<f64>, diag_shift: f64) -> Self {
        let n = row.len();
        let mut planner = FftPlanner::new();
        let fft2 = planner.plan_fft_forward(2 * n);
        let ifft2 = planner.plan_fft_inverse(2 * n);
        let mut embed = vec![Complex::new(0.0, 0.0); 2 * n];
        embed[0].re = row[0] + diag_shift;
        for k in 1..n {
            embed[k].re = row[k];
            embed[2 * n - k].re = row[k];
        }
        fft2.process(&mut embed);
        SymToeplitz { row, diag_shift, fft2, ifft2, embed }
    }

    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn diagonal(&self) -> f64 {
        self.row[0] + self.diag_shift
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diagonal()
        } else {
            self.row[i.abs_diff(j)]
        }
    }

    /// Index of the last nonzero off-diagonal.
    pub fn bandwidth(&self) -> usize {
        self.row.iter().rposition(|&v| v != 0.0).unwrap_or(0)
    }

    /// `O(N log N)` product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        buf.resize(2 * n, Complex::new(0.0, 0.0));
        self.fft2.process(&mut buf);
        for (b, e) in buf.iter_mut().zip(&self.embed) {
            *b *= e;
        }
        self.ifft2.process(&mut buf);
        let scale = 1.0 / (2 * n) as f64;
        buf[..n].iter().map(|c| c.re * scale).collect()
    }

    /// Row-by-row product over the band, `O(N b)`.
    pub fn matvec_dense(&self, x: &[f64], exec: Execution) -> Vec<f64> {
        let n = self.len();
        let b = self.bandwidth();
        map_range(exec, n, |i| {
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(n - 1);
            (lo..=hi).map(|j| self.entry(i, j) * x[j]).sum()
        })
    }
}

/// Optimal circulant approximation `c_k = ((n-k) t_k + k t_{n-k}) / n`,
/// inverted in Fourier space.
struct ChanPreconditioner {
    inv_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl ChanPreconditioner {
    fn new(t: &SymToeplitz) -> Option<Self> {
        let n = t.len();
        let mut c: Vec<Complex<f64>> = (0..n)
            .map(|k| {
                let tk = if k == 0 { t.diagonal() } else { t.row[k] };
                let tnk = if k == 0 { 0.0 } else { t.row[n - k] };
                Complex::new(((n - k) as f64 * tk + k as f64 * tnk) / n as f64, 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        fft.process(&mut c);
        if c.iter().any(|z| !(z.re > 0.0)) {
            return None;
        }
        Some(ChanPreconditioner { inv_eig: c.iter().map(|z| 1.0 / (z.re * n as f64)).collect(), fft, ifft })
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.inv_eig) {
            *b *= s;
        }
        self.ifft.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub preconditioned: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients with FFT matvec; stops at relative
/// residual `tol` or after `max_iter` steps.
pub fn pcg(t: &SymToeplitz, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, CgReport) {
    let n = t.len();
    let pre = ChanPreconditioner::new(t);
    let diag = t.diagonal();
    let precondition = |r: &[f64]| match &pre {
        Some(p) => p.apply(r),
        None => r.iter().map(|v| v / diag).collect(),
    };
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        let report = CgReport { iterations: 0, relative_residual: 0.0, converged: true, preconditioned: pre.is_some() };
        return (x, report);
    }
    let mut r = b.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    let mut it = 0;
    while it < max_iter {
        let ap = t.matvec(&p);
        let step = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        it += 1;
        res = dot(&r, &r).sqrt() / bnorm;
        if res <= tol {
            break;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // the recursive residual drifts from the true one; report the latter
    let ax = t.matvec(&x);
    let true_res = b.iter().zip(&ax).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt() / bnorm;
    let report = CgReport {
        iterations: it,
        relative_residual: true_res,
        converged: res <= tol,
        preconditioned: pre.is_some(),
    };
    (x, report)
}

/// Banded LU without pivoting; valid for the diagonally dominant matrices
/// assembled here. Storage `N (2b + 1)`.
pub fn banded_lu_solve(t: &SymToeplitz, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    let b = t.bandwidth();
    let w = 2 * b + 1;
    // band[i][j - i + b]
    let mut band = vec![0.0; n * w];
    for i in 0..n {
        let lo = i.saturating_sub(b);
        let hi = (i + b).min(n - 1);
        for j in lo..=hi {
            band[i * w + j + b - i] = t.entry(i, j);
        }
    }
    let mut x = rhs.to_vec();
    for k in 0..n {
        let pivot = band[k * w + b];
        if pivot.abs() < 1e-300 {
            return Err(FracError::Singular { row: k, pivot });
        }
        let hi = (k + b).min(n - 1);
        for i in k + 1..=hi {
            let l = band[i * w + k + b - i] / pivot;
            if l == 0.0 {
                continue;
            }
            band[i * w + k + b - i] = l;
            for j in k + 1..=hi {
                band[i * w + j + b - i] -= l * band[k * w + j + b - k];
            }
            x[i] -= l * x[k];
        }
    }
    for k in (0..n).rev() {
        let hi = (k + b).min(n - 1);
        let mut s = x[k];
        for j in k + 1..=hi {
            s -= band[k * w + j + b - k] * x[j];
        }
        x[k] = s / band[k * w + b];
    }
    Ok(x)
}
