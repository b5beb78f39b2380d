//! Grünwald–Letnikov weights.

use crate::order::FracOrder;

/// Weights `c_k = (-1)^k binom(α, k)` of the Grünwald–Letnikov difference.
#[derive(Debug, Clone, PartialEq)]
pub struct GLCoefficients {
    pub alpha: FracOrder,
    pub c: Vec<f64>,
}

impl GLCoefficients {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }
}

/// `c_0 = 1`, `c_k = (1 - (α+1)/k) c_{k-1}` for `k = 1..=k_max`, evaluated as
/// `((k-1) - α)/k` so that `c_1 = -α` exactly.
pub fn gl_coefficients(alpha: FracOrder, k_max: usize) -> GLCoefficients {
    GLCoefficients { alpha, c: gl_weights(alpha.value(), k_max) }
}

/// Same recurrence for any real order (the integer order 2 is used in tests).
pub fn gl_weights(alpha: f64, k_max: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(k_max + 1);
    c.push(1.0);
    for k in 1..=k_max {
        let prev = c[k - 1];
        let k = k as f64;
        c.push(((k - 1.0) - alpha) / k * prev);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_tables() {
        let f = |a| FracOrder::new(a).unwrap();
        assert_eq!(gl_coefficients(f(1.0), 2).c, vec![1.0, -1.0, 0.0]);
        assert_eq!(gl_coefficients(f(0.5), 2).c, vec![1.0, -0.5, -0.125]);
        let c = gl_coefficients(f(1.5), 3).c;
        for (got, want) in c.iter().zip([1.0, -1.5, 0.375, 0.0625]) {
            assert!((got - want).abs() < 1e-16);
        }
    }

    #[test]
    fn partial_sums_vanish() {
        let c = gl_coefficients(FracOrder::new(1.5).unwrap(), 4000).c;
        assert!(c.iter().sum::<f64>().abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn recurrence_and_signs(a in 0.01f64..1.99, k in 2usize..200) {
            let c = gl_weights(a, k);
            prop_assert_eq!(c.len(), k + 1);
            prop_assert_eq!(c[0], 1.0);
            prop_assert_eq!(c[1], -a);
            for j in 1..=k {
                let want = (1.0 - (a + 1.0) / j as f64) * c[j - 1];
                prop_assert!((c[j] - want).abs() <= 1e-15 * (1.0 + a) * c[j - 1].abs());
            }
            // For 1 < α < 2 all weights past c_1 are positive; for α < 1 all are negative.
            for &v in &c[2..] {
                if a > 1.0 { prop_assert!(v > 0.0); }
                if a < 1.0 { prop_assert!(v < 0.0); }
            }
        }
    }
}
