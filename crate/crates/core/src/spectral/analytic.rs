//! Closed-form Dirichlet eigenbases: interval sines, rectangle tensor sines
//! and disk Fourier–Bessel modes. Inner products use tensor Gauss–Legendre
//! rules (polar for the disk) with at least four nodes per half-wavelength of
//! the highest mode.

use crate::domain::Point;
use crate::field::DiffField;
use crate::quadrature::GaussLegendre;
use crate::special::{bessel_j, bessel_j_with_deriv, bessel_j_zeros_below};
use std::f64::consts::PI;

/// `sin(jθ), cos(jθ)` for `j = 1..=n` by complex rotation.
fn sin_cos_table(theta: f64, n: usize, s: &mut Vec<f64>, c: &mut Vec<f64>) {
    s.clear();
    c.clear();
    let (s1, c1) = theta.sin_cos();
    let (mut sj, mut cj) = (s1, c1);
    for j in 1..=n {
        s.push(sj);
        c.push(cj);
        if j % 32 == 0 {
            // Refresh to keep rounding from accumulating.
            let (a, b) = ((j + 1) as f64 * theta).sin_cos();
            sj = a;
            cj = b;
        } else {
            let ns = sj * c1 + cj * s1;
            let nc = cj * c1 - sj * s1;
            sj = ns;
            cj = nc;
        }
    }
}

fn gl_nodes(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    GaussLegendre::new(n).mapped(a, b)
}

#[derive(Debug, Clone)]
pub(super) struct IntervalBasis {
    a: f64,
    len: f64,
    k: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl IntervalBasis {
    pub fn new(a: f64, len: f64, k: usize) -> Self {
        let (nodes, weights) = gl_nodes(4 * k + 32, a, a + len);
        IntervalBasis { a, len, k, nodes, weights }
    }

    fn norm(&self) -> f64 {
        (2.0 / self.len).sqrt()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (1..=self.k).map(|j| (j as f64 * PI / self.len).powi(2)).collect()
    }

    fn theta(&self, x: f64) -> f64 {
        PI * (x - self.a) / self.len
    }

    pub fn mode(&self, k: usize, x: f64) -> f64 {
        if x < self.a || x > self.a + self.len {
            return 0.0;
        }
        self.norm() * ((k + 1) as f64 * self.theta(x)).sin()
    }

    pub fn project(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        let (mut s, mut c) = (Vec::new(), Vec::new());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let fw = w * f([x, 0.0]) * self.norm();
            if fw == 0.0 {
                continue;
            }
            sin_cos_table(self.theta(x), self.k, &mut s, &mut c);
            for (o, sv) in out.iter_mut().zip(&s) {
                *o += fw * sv;
            }
        }
        out
    }

    pub fn project_gradient(&self, v: &DiffField) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        let (mut s, mut c) = (Vec::new(), Vec::new());
        let scale = self.norm() * PI / self.len;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let gw = w * v.grad([x, 0.0])[0] * scale;
            sin_cos_table(self.theta(x), self.k, &mut s, &mut c);
            for (j, (o, cv)) in out.iter_mut().zip(&c).enumerate() {
                *o += gw * (j + 1) as f64 * cv;
            }
        }
        out
    }

    pub fn integrate(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f([x, 0.0])).sum()
    }

    pub fn series(&self, coeffs: &[f64], x: f64) -> f64 {
        if x < self.a || x > self.a + self.len {
            return 0.0;
        }
        let (mut s, mut c) = (Vec::new(), Vec::new());
        sin_cos_table(self.theta(x), coeffs.len(), &mut s, &mut c);
        self.norm() * coeffs.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Derivative of mode `k` at `x` (used by the boundary-series cross-check).
    pub fn mode_deriv(&self, k: usize, x: f64) -> f64 {
        let j = (k + 1) as f64;
        self.norm() * j * PI / self.len * (j * self.theta(x)).cos()
    }
}

/// One-dimensional sine factor tables on Gauss nodes.
#[derive(Debug, Clone)]
struct SineAxis {
    lo: f64,
    len: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `sin`, `d/dx sin` of normalized modes `1..=max` at the nodes, mode-major.
    val: Vec<Vec<f64>>,
    der: Vec<Vec<f64>>,
}

impl SineAxis {
    fn new(lo: f64, len: f64, max: usize) -> Self {
        let (nodes, weights) = gl_nodes(4 * max + 32, lo, lo + len);
        let norm = (2.0 / len).sqrt();
        let mut val = vec![Vec::with_capacity(nodes.len()); max];
        let mut der = vec![Vec::with_capacity(nodes.len()); max];
        let (mut s, mut c) = (Vec::new(), Vec::new());
        for &x in &nodes {
            sin_cos_table(PI * (x - lo) / len, max, &mut s, &mut c);
            for m in 0..max {
                val[m].push(norm * s[m]);
                der[m].push(norm * (m + 1) as f64 * PI / len * c[m]);
            }
        }
        SineAxis { lo, len, nodes, weights, val, der }
    }

    fn eval(&self, m: usize, x: f64) -> f64 {
        (2.0 / self.len).sqrt() * (m as f64 * PI * (x - self.lo) / self.len).sin()
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.lo + self.len
    }
}

#[derive(Debug, Clone)]
pub(super) struct RectBasis {
    modes: Vec<(usize, usize)>,
    eig: Vec<f64>,
    ax: SineAxis,
    ay: SineAxis,
}

impl RectBasis {
    pub fn new(lo: Point, len: [f64; 2], k: usize) -> Self {
        let lam = |m: usize, n: usize| (m as f64 * PI / len[0]).powi(2) + (n as f64 * PI / len[1]).powi(2);
        // Grow the search box until it holds k modes below the cutoff.
        let mut cut = lam(1, 1) * 2.0;
        let modes = loop {
            let mx = (cut.sqrt() * len[0] / PI).floor() as usize;
            let ny = (cut.sqrt() * len[1] / PI).floor() as usize;
            let mut cand = Vec::new();
            for m in 1..=mx.max(1) {
                for n in 1..=ny.max(1) {
                    if lam(m, n) <= cut {
                        cand.push((m, n));
                    }
                }
            }
            if cand.len() >= k {
                cand.sort_by(|p, q| lam(p.0, p.1).total_cmp(&lam(q.0, q.1)).then(p.cmp(q)));
                cand.truncate(k);
                break cand;
            }
            cut *= 1.5;
        };
        let mmax = modes.iter().map(|p| p.0).max().unwrap_or(1);
        let nmax = modes.iter().map(|p| p.1).max().unwrap_or(1);
        let eig = modes.iter().map(|&(m, n)| lam(m, n)).collect();
        RectBasis { modes, eig, ax: SineAxis::new(lo[0], len[0], mmax), ay: SineAxis::new(lo[1], len[1], nmax) }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig.clone()
    }

    fn inside(&self, x: Point) -> bool {
        self.ax.contains(x[0]) && self.ay.contains(x[1])
    }

    pub fn mode(&self, k: usize, x: Point) -> f64 {
        if !self.inside(x) {
            return 0.0;
        }
        let (m, n) = self.modes[k];
        self.ax.eval(m, x[0]) * self.ay.eval(n, x[1])
    }

    fn nmax(&self) -> usize {
        self.ay.val.len()
    }

    /// `G[n][i] = Σ_j w_j g(x_i, y_j) t_n(y_j)` for the tables `t`.
    fn contract_y(&self, grid: &[f64], table: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let ny = self.ay.nodes.len();
        let nx = self.ax.nodes.len();
        table
            .iter()
            .map(|t| {
                (0..nx)
                    .map(|i| {
                        let row = &grid[i * ny..(i + 1) * ny];
                        row.iter().zip(t).zip(&self.ay.weights).map(|((g, s), w)| g * s * w).sum()
                    })
                    .collect()
            })
            .collect()
    }

    fn grid_eval<T>(&self, f: impl Fn(Point) -> T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.ax.nodes.len() * self.ay.nodes.len());
        for &x in &self.ax.nodes {
            for &y in &self.ay.nodes {
                out.push(f([x, y]));
            }
        }
        out
    }

    pub fn project(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        let grid = self.grid_eval(f);
        let g = self.contract_y(&grid, &self.ay.val[..self.nmax()]);
        self.modes
            .iter()
            .map(|&(m, n)| {
                let sx = &self.ax.val[m - 1];
                sx.iter().zip(&g[n - 1]).zip(&self.ax.weights).map(|((a, b), w)| a * b * w).sum()
            })
            .collect()
    }

    pub fn project_gradient(&self, v: &DiffField) -> Vec<f64> {
        let grads = self.grid_eval(|x| v.grad(x));
        let gx: Vec<f64> = grads.iter().map(|g| g[0]).collect();
        let gy: Vec<f64> = grads.iter().map(|g| g[1]).collect();
        let cx = self.contract_y(&gx, &self.ay.val);
        let cy = self.contract_y(&gy, &self.ay.der);
        self.modes
            .iter()
            .map(|&(m, n)| {
                let sx = &self.ax.val[m - 1];
                let dx = &self.ax.der[m - 1];
                (0..sx.len())
                    .map(|i| self.ax.weights[i] * (dx[i] * cx[n - 1][i] + sx[i] * cy[n - 1][i]))
                    .sum()
            })
            .collect()
    }

    pub fn integrate(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
        let mut s = 0.0;
        for (&x, &wx) in self.ax.nodes.iter().zip(&self.ax.weights) {
            for (&y, &wy) in self.ay.nodes.iter().zip(&self.ay.weights) {
                s += wx * wy * f([x, y]);
            }
        }
        s
    }

    pub fn series(&self, coeffs: &[f64], x: Point) -> f64 {
        if !self.inside(x) {
            return 0.0;
        }
        let (mut sx, mut cx, mut sy, mut cy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        sin_cos_table(PI * (x[0] - self.ax.lo) / self.ax.len, self.ax.val.len(), &mut sx, &mut cx);
        sin_cos_table(PI * (x[1] - self.ay.lo) / self.ay.len, self.nmax(), &mut sy, &mut cy);
        let norm = (4.0 / (self.ax.len * self.ay.len)).sqrt();
        norm * coeffs
            .iter()
            .zip(&self.modes)
            .map(|(c, &(m, n))| c * sx[m - 1] * sy[n - 1])
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy)]
struct DiskMode {
    m: usize,
    zero: f64,
    sine: bool,
    norm: f64,
}

#[derive(Debug, Clone)]
pub(super) struct DiskBasis {
    center: Point,
    r: f64,
    modes: Vec<DiskMode>,
    mmax: usize,
    rho: Vec<f64>,
    rw: Vec<f64>,
    nphi: usize,
    /// `J_m(j ρ_i / r)` and `(j/r) J_m'(j ρ_i / r)` per mode at the radial nodes.
    jtab: Vec<Vec<f64>>,
    dtab: Vec<Vec<f64>>,
}

impl DiskBasis {
    pub fn new(center: Point, r: f64, k: usize) -> Self {
        let mut cut = 2.0 * (k as f64).sqrt() + 6.0;
        let mut modes = loop {
            let mut cand = Vec::new();
            let mut m = 0;
            loop {
                let zs = bessel_j_zeros_below(m, cut);
                if zs.is_empty() {
                    break;
                }
                for z in zs {
                    let jm1 = bessel_j(m + 1, z);
                    let ang = if m == 0 { 2.0 * PI } else { PI };
                    let norm = (ang * r * r / 2.0 * jm1 * jm1).sqrt();
                    cand.push(DiskMode { m, zero: z, sine: false, norm });
                    if m > 0 {
                        cand.push(DiskMode { m, zero: z, sine: true, norm });
                    }
                }
                m += 1;
            }
            if cand.len() >= k {
                break cand;
            }
            cut *= 1.3;
        };
        modes.sort_by(|a, b| {
            a.zero
                .total_cmp(&b.zero)
                .then(a.m.cmp(&b.m))
                .then(a.sine.cmp(&b.sine))
        });
        modes.truncate(k);
        let mmax = modes.iter().map(|d| d.m).max().unwrap_or(0);
        let jmax = modes.iter().map(|d| d.zero).fold(0.0, f64::max);
        let nr = jmax as usize + 32;
        let (rho, rw) = gl_nodes(nr, 0.0, r);
        let nphi = 4 * mmax + 16;
        let jtab = modes
            .iter()
            .map(|d| rho.iter().map(|&p| bessel_j(d.m, d.zero * p / r)).collect())
            .collect();
        let dtab = modes
            .iter()
            .map(|d| rho.iter().map(|&p| d.zero / r * bessel_j_with_deriv(d.m, d.zero * p / r).1).collect())
            .collect();
        DiskBasis { center, r, modes, mmax, rho, rw, nphi, jtab, dtab }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|d| (d.zero / self.r).powi(2)).collect()
    }

    fn polar(&self, x: Point) -> (f64, f64) {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        (dx.hypot(dy), dy.atan2(dx))
    }

    fn angular(d: &DiskMode, phi: f64) -> f64 {
        let a = d.m as f64 * phi;
        if d.sine {
            a.sin()
        } else {
            a.cos()
        }
    }

    pub fn mode(&self, k: usize, x: Point) -> f64 {
        let (rho, phi) = self.polar(x);
        if rho > self.r {
            return 0.0;
        }
        let d = &self.modes[k];
        bessel_j(d.m, d.zero * rho / self.r) * Self::angular(d, phi) / d.norm
    }

    fn phis(&self) -> Vec<f64> {
        (0..self.nphi).map(|l| 2.0 * PI * l as f64 / self.nphi as f64).collect()
    }

    /// Angular Fourier moments `[cos_m, sin_m]` of samples on each ring.
    fn angular_moments(&self, grid: &[f64]) -> Vec<Vec<[f64; 2]>> {
        let phis = self.phis();
        let dphi = 2.0 * PI / self.nphi as f64;
        (0..self.rho.len())
            .map(|i| {
                let row = &grid[i * self.nphi..(i + 1) * self.nphi];
                (0..=self.mmax)
                    .map(|m| {
                        let mut c = 0.0;
                        let mut s = 0.0;
                        for (v, &p) in row.iter().zip(&phis) {
                            let (sn, cs) = (m as f64 * p).sin_cos();
                            c += v * cs;
                            s += v * sn;
                        }
                        [c * dphi, s * dphi]
                    })
                    .collect()
            })
            .collect()
    }

    fn grid_eval<T>(&self, f: impl Fn(Point, f64) -> T) -> Vec<T> {
        let phis = self.phis();
        let mut out = Vec::with_capacity(self.rho.len() * self.nphi);
        for &p in &self.rho {
            for &phi in &phis {
                out.push(f([self.center[0] + p * phi.cos(), self.center[1] + p * phi.sin()], phi));
            }
        }
        out
    }

    pub fn project(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        let grid = self.grid_eval(|x, _| f(x));
        let mom = self.angular_moments(&grid);
        self.modes
            .iter()
            .zip(&self.jtab)
            .map(|(d, jt)| {
                let idx = usize::from(d.sine);
                (0..self.rho.len())
                    .map(|i| self.rw[i] * self.rho[i] * jt[i] * mom[i][d.m][idx])
                    .sum::<f64>()
                    / d.norm
            })
            .collect()
    }

    pub fn project_gradient(&self, v: &DiffField) -> Vec<f64> {
        // Radial and tangential components of ∇v on the polar grid.
        let g = self.grid_eval(|x, phi| {
            let gr = v.grad(x);
            let (s, c) = phi.sin_cos();
            (gr[0] * c + gr[1] * s, -gr[0] * s + gr[1] * c)
        });
        let radial: Vec<f64> = g.iter().map(|p| p.0).collect();
        let tangential: Vec<f64> = g.iter().map(|p| p.1).collect();
        let mr = self.angular_moments(&radial);
        let mt = self.angular_moments(&tangential);
        self.modes
            .iter()
            .zip(self.jtab.iter().zip(&self.dtab))
            .map(|(d, (jt, dt))| {
                let m = d.m as f64;
                (0..self.rho.len())
                    .map(|i| {
                        // ∂_ρ e uses the same angular factor; (1/ρ)∂_φ e swaps it.
                        let (rad, tan) = if d.sine {
                            (mr[i][d.m][1], m * mt[i][d.m][0])
                        } else {
                            (mr[i][d.m][0], -m * mt[i][d.m][1])
                        };
                        self.rw[i] * self.rho[i] * (dt[i] * rad + jt[i] / self.rho[i] * tan)
                    })
                    .sum::<f64>()
                    / d.norm
            })
            .collect()
    }

    pub fn integrate(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
        let grid = self.grid_eval(|x, _| f(x));
        let dphi = 2.0 * PI / self.nphi as f64;
        (0..self.rho.len())
            .map(|i| {
                self.rw[i] * self.rho[i] * dphi * grid[i * self.nphi..(i + 1) * self.nphi].iter().sum::<f64>()
            })
            .sum()
    }

    pub fn series(&self, coeffs: &[f64], x: Point) -> f64 {
        let (rho, phi) = self.polar(x);
        if rho > self.r {
            return 0.0;
        }
        coeffs
            .iter()
            .zip(&self.modes)
            .map(|(c, d)| {
                if *c == 0.0 {
                    0.0
                } else {
                    c * bessel_j(d.m, d.zero * rho / self.r) * Self::angular(d, phi) / d.norm
                }
            })
            .sum()
    }
}
