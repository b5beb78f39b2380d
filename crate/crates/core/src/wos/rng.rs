//! Reproducible per-path random streams and the Beta sampler.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha8 keyed by `seed` with an independent stream per path, so results do
/// not depend on how paths are scheduled over threads.
#[derive(Debug, Clone)]
pub struct StableRng {
    inner: ChaCha8Rng,
    pub seed: u64,
    pub stream: u64,
}

impl StableRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StableRng { inner, seed, stream }
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    /// Uniform point on the unit circle.
    pub fn direction2(&mut self) -> [f64; 2] {
        let t = std::f64::consts::TAU * self.uniform();
        [t.cos(), t.sin()]
    }

    /// Uniform direction on the unit sphere of `R^d`, `d ∈ {1, 2}`.
    pub fn direction(&mut self, d: usize) -> [f64; 2] {
        if d == 1 {
            [if self.coin() { 1.0 } else { -1.0 }, 0.0]
        } else {
            self.direction2()
        }
    }
}

/// Beta(a, b) draw for `0 < a, b < 1` by Jöhnk's method. Returns `(x, 1 - x)`
/// with both parts computed directly so neither loses relative precision.
pub fn sample_beta(rng: &mut StableRng, a: f64, b: f64) -> (f64, f64) {
    debug_assert!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0);
    loop {
        let lx = rng.uniform().ln() / a;
        let ly = rng.uniform().ln() / b;
        let m = lx.max(ly);
        let (ex, ey) = ((lx - m).exp(), (ly - m).exp());
        // accept when X + Y <= 1
        if m + (ex + ey).ln() <= 0.0 {
            let s = ex + ey;
            return (ex / s, ey / s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Welford;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = StableRng::new(11, 3);
        let mut b = StableRng::new(11, 3);
        let mut c = StableRng::new(11, 4);
        let xa: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        let xc: Vec<f64> = (0..8).map(|_| c.uniform()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert!(xa.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    fn moments(a: f64, b: f64, n: usize) -> Welford {
        let mut rng = StableRng::new(5, 0);
        let mut w = Welford::default();
        for _ in 0..n {
            let (x, y) = sample_beta(&mut rng, a, b);
            assert!((x + y - 1.0).abs() < 1e-15 && x >= 0.0 && y >= 0.0);
            w.push(x);
        }
        w
    }

    #[test]
    fn beta_moments() {
        let n = 100_000;
        for (a, b) in [(0.5, 0.5), (0.25, 0.75), (0.9, 0.1), (0.05, 0.95)] {
            let w = moments(a, b, n);
            let mean = a / (a + b);
            let var = a * b / ((a + b).powi(2) * (a + b + 1.0));
            assert!((w.mean() - mean).abs() < 3.0 * (var / n as f64).sqrt() + 1e-12, "mean a={a} b={b}");
            // sd of the sample variance: sqrt((μ4 - σ^4)/n) <= sqrt(var/n)
            assert!((w.variance() - var).abs() < 3.0 * (var / n as f64).sqrt(), "var a={a} b={b}");
        }
        let w = moments(0.25, 0.75, n);
        assert!((w.variance() - 0.09375).abs() < 3e-3);
    }
}
