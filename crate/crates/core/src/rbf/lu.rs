//! Dense LU with partial pivoting on a row-major matrix, with transposed
//! solves for Hager's 1-norm condition estimate.

use crate::error::{FracError, Result};

/// Pivots smaller than this in magnitude are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    /// Packed unit-lower `L` and upper `U`, row-major.
    lu: Vec<f64>,
    /// Row `k` of `LU` is row `perm[k]` of the input.
    perm: Vec<usize>,
    norm1: f64,
}

impl DenseLu {
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix is not n by n");
        let norm1 = (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if !(pv >= PIVOT_FLOOR) {
                return Err(FracError::Singular { row: k, pivot: pv });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            let d = pivot_row[k];
            for row in tail.chunks_mut(n) {
                let l = row[k] / d;
                row[k] = l;
                if l != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *x -= l * u;
                    }
                }
            }
        }
        Ok(DenseLu { n, lu: a, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest `|U_kk|`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n).map(|k| self.lu[k * self.n + k].abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut w = b.to_vec();
        // U^T y = b, column sweeps over the rows of U
        for i in 0..n {
            w[i] /= self.lu[i * n + i];
            let wi = w[i];
            for (x, &u) in w[i + 1..].iter_mut().zip(&self.lu[i * n + i + 1..(i + 1) * n]) {
                *x -= u * wi;
            }
        }
        for i in (0..n).rev() {
            let wi = w[i];
            for (x, &l) in w[..i].iter_mut().zip(&self.lu[i * n..i * n + i]) {
                *x -= l * wi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = w[k];
        }
        x
    }

    /// Hager's estimate of `‖A‖_1 ‖A^{-1}‖_1`; a lower bound that is
    /// usually within a small factor.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        self.norm1 * est
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matvec(a: &[f64], x: &[f64]) -> Vec<f64> {
        a.chunks(x.len()).map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn needs_pivoting() {
        let a = vec![0.0, 1.0, 2.0, 3.0];
        let lu = DenseLu::factor(a.clone(), 2).unwrap();
        let x = lu.solve(&[1.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        let y = lu.solve_transpose(&[2.0, 4.0]);
        // A^T = [[0, 2], [1, 3]]
        assert!((2.0 * y[1] - 2.0).abs() < 1e-15 && (y[0] + 3.0 * y[1] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(matches!(DenseLu::factor(a, 2), Err(FracError::Singular { row: 1, .. })));
    }

    #[test]
    fn condition_of_diagonal() {
        let lu = DenseLu::factor(vec![1.0, 0.0, 0.0, 0.0, 1e-6, 0.0, 0.0, 0.0, 2.0], 3).unwrap();
        assert!((lu.condition_estimate() - 2e6).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn solves_random_systems(vals in proptest::collection::vec(-1.0f64..1.0, 36), b in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let n = 6;
            let mut a = vals.clone();
            for i in 0..n {
                a[i * n + i] += 4.0;
            }
            let lu = DenseLu::factor(a.clone(), n).unwrap();
            let x = lu.solve(&b);
            for (r, bi) in matvec(&a, &x).iter().zip(&b) {
                prop_assert!((r - bi).abs() < 1e-12);
            }
            let mut at = vec![0.0; n * n];
            for i in 0..n { for j in 0..n { at[j * n + i] = a[i * n + j]; } }
            let y = lu.solve_transpose(&b);
            for (r, bi) in matvec(&at, &y).iter().zip(&b) {
                prop_assert!((r - bi).abs() < 1e-12);
            }
            prop_assert!(lu.condition_estimate() >= 1.0);
        }
    }
}
