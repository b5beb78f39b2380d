//! Direction quadrature and the truncated vector Grünwald–Letnikov difference.
//!
//! Along a direction `θ` the difference
//!
//! `h^{-α} Σ_{k=0}^{K1} c_k u(x - khθ) + h^{-α} Σ_{k=K1+1}^{K2} c_k g(x - khθ)`
//!
//! approximates `D^α_θ u(x)` to `O(h)`. `K1` is the last index whose node is
//! strictly inside the domain (boundary nodes count as exterior), so the
//! unknown `u` is only sampled inside. `K2` bounds the exterior sum only;
//! when `K2 <= K1` the exterior sum is empty.

use crate::constants::directional_constant;
use crate::domain::{Domain, Point};
use crate::error::{FracError, Result};
use crate::field::ScalarField;
use crate::gl::gl_weights;
use crate::order::FracOrder;
use crate::quadrature::GaussLegendre;
use std::f64::consts::{PI, TAU};

use super::collocation::MultiquadricRBF;

/// Nodes and weights for `∫_{|θ|=1} dθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirQuadrature {
    pub dim: usize,
    pub angles: Vec<f64>,
    pub directions: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DirQuadrature {
    /// `p`-point Gauss–Legendre rule mapped to `[0, 2π]`.
    pub fn gauss_legendre(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(FracError::InvalidParameter("direction rule needs at least one node".into()));
        }
        let (angles, weights) = GaussLegendre::new(p).mapped(0.0, TAU);
        Ok(Self::from_angles(2, angles, weights))
    }

    /// The two directions `±1` of the real line, unit weights.
    pub fn one_d() -> Self {
        Self::from_angles(1, vec![0.0, PI], vec![1.0, 1.0])
    }

    fn from_angles(dim: usize, angles: Vec<f64>, weights: Vec<f64>) -> Self {
        let directions = angles
            .iter()
            .map(|&t| if dim == 1 { [t.cos().signum(), 0.0] } else { [t.cos(), t.sin()] })
            .collect();
        DirQuadrature { dim, angles, directions, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Every node shifted by `angle` (2D only).
    pub fn rotated(&self, angle: f64) -> Self {
        if self.dim == 1 {
            return self.clone();
        }
        Self::from_angles(2, self.angles.iter().map(|t| t + angle).collect(), self.weights.clone())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.angles.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Step `h` and exterior truncation `K2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLScheme {
    pub h: f64,
    pub k2: usize,
}

impl GLScheme {
    pub fn new(h: f64, k2: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) || k2 == 0 {
            return Err(FracError::InvalidParameter(format!("need h > 0 and K2 >= 1, got h = {h}, K2 = {k2}")));
        }
        Ok(GLScheme { h, k2 })
    }
}

/// `C_{α,d} Σ_l w_l D^α_{θ_l}` on a fixed domain, discretized by the
/// truncated difference.
#[derive(Debug, Clone)]
pub struct DirectionalGL {
    pub alpha: f64,
    pub scheme: GLScheme,
    pub quad: DirQuadrature,
    pub domain: Domain,
    constant: f64,
    /// `h^{-α}`.
    scale: f64,
    coeffs: Vec<f64>,
    /// Largest index whose node can still be inside the domain.
    k_span: usize,
}

impl DirectionalGL {
    /// Errors at `α = 1`, where the directional form does not apply.
    pub fn new(alpha: FracOrder, scheme: GLScheme, quad: DirQuadrature, domain: Domain) -> Result<Self> {
        let c = directional_constant(quad.dim, alpha)?;
        Self::with_constant(alpha.value(), c, scheme, quad, domain)
    }

    /// Any real order with an explicit prefactor; order 2 with prefactor
    /// `1/2` gives the averaged second difference.
    pub fn with_constant(order: f64, constant: f64, scheme: GLScheme, quad: DirQuadrature, domain: Domain) -> Result<Self> {
        if quad.dim != domain.dim() {
            return Err(FracError::InvalidParameter(format!(
                "{}D direction rule on a {}D domain",
                quad.dim,
                domain.dim()
            )));
        }
        let (lo, hi) = domain.bounding_box();
        let diam = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
        let k_span = (diam / scheme.h).ceil() as usize + 1;
        let coeffs = gl_weights(order, k_span.max(scheme.k2));
        Ok(DirectionalGL { alpha: order, scheme, quad, domain, constant, scale: scheme.h.powf(-order), coeffs, k_span })
    }

    /// `C_{α,d}`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `h^{-α}`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    fn node(&self, x: Point, theta: Point, k: usize) -> Point {
        let s = k as f64 * self.scheme.h;
        [x[0] - s * theta[0], x[1] - s * theta[1]]
    }

    fn is_convex(&self) -> bool {
        matches!(self.domain, Domain::Interval { .. } | Domain::Rectangle { .. } | Domain::Disk { .. })
    }

    /// Half-open index ranges of nodes `x - khθ` strictly inside the domain.
    /// On convex domains this is `[0, K1 + 1)`.
    pub fn interior_ranges(&self, x: Point, theta: Point) -> Result<Vec<(usize, usize)>> {
        if !self.domain.contains_strict(x) {
            return Err(FracError::Domain(format!("({}, {}) is not interior", x[0], x[1])));
        }
        if self.is_convex() {
            return Ok(vec![(0, self.k1(x, theta)? + 1)]);
        }
        let mut out = Vec::new();
        let mut start = None;
        for k in 0..=self.k_span {
            match (self.domain.contains_strict(self.node(x, theta, k)), start) {
                (true, None) => start = Some(k),
                (false, Some(s)) => {
                    out.push((s, k));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, self.k_span + 1));
        }
        Ok(out)
    }

    /// `K1`: the first node index before the ray leaves the open domain.
    pub fn k1(&self, x: Point, theta: Point) -> Result<usize> {
        let delta = self.domain.backward_distance(x, theta)?;
        let mut k = ((delta / self.scheme.h).floor() as usize).min(self.k_span);
        while k > 0 && !self.domain.contains_strict(self.node(x, theta, k)) {
            k -= 1;
        }
        while k < self.k_span && self.domain.contains_strict(self.node(x, theta, k + 1)) {
            k += 1;
        }
        Ok(k)
    }

    /// Visits the exterior indices `k <= K2` with their coefficient.
    fn for_exterior(&self, ranges: &[(usize, usize)], mut f: impl FnMut(usize, f64)) {
        let mut k = 0;
        for &(a, b) in ranges.iter().chain(std::iter::once(&(self.scheme.k2 + 1, self.scheme.k2 + 1))) {
            while k < a.min(self.scheme.k2 + 1) {
                f(k, self.coeffs[k]);
                k += 1;
            }
            k = k.max(b);
        }
    }

    /// `h^{-α} Σ_{k<=K1} c_k φ(|x - khθ - center|)`: one basis function under
    /// one directional difference.
    pub fn gl_apply_basis(&self, rbf: &MultiquadricRBF, center: Point, x: Point, theta: Point) -> Result<f64> {
        let mut s = 0.0;
        for (a, b) in self.interior_ranges(x, theta)? {
            for k in a..b {
                s += self.coeffs[k] * rbf.phi_between(self.node(x, theta, k), center);
            }
        }
        Ok(self.scale * s)
    }

    /// `h^{-α} Σ_{K1<k<=K2} c_k g(x - khθ)`.
    pub fn gl_exterior_correction(&self, g: &ScalarField, x: Point, theta: Point) -> Result<f64> {
        if g.is_known_zero() {
            return Ok(0.0);
        }
        let ranges = self.interior_ranges(x, theta)?;
        let mut s = 0.0;
        self.for_exterior(&ranges, |k, c| s += c * g.eval(self.node(x, theta, k)));
        Ok(self.scale * s)
    }

    /// Truncation remainder `h^{-α} Σ_{K2<k<=k_probe} c_k g(x - khθ)`.
    pub fn remainder(&self, g: &ScalarField, x: Point, theta: Point, k_probe: usize) -> f64 {
        let k2 = self.scheme.k2;
        let mut c = self.coeffs[k2];
        let mut s = 0.0;
        for k in k2 + 1..=k_probe {
            c *= ((k - 1) as f64 - self.alpha) / k as f64;
            s += c * g.eval(self.node(x, theta, k));
        }
        self.scale * s
    }

    /// `C Σ_l w_l R_l(x)`, the remainder integrated over directions.
    pub fn integrated_remainder(&self, g: &ScalarField, x: Point, k_probe: usize) -> f64 {
        self.constant
            * self.quad.directions.iter().zip(&self.quad.weights).map(|(&t, &w)| w * self.remainder(g, x, t, k_probe)).sum::<f64>()
    }

    /// The full discrete operator at `x`: `u` on interior nodes, `g` on
    /// exterior nodes up to `K2`.
    pub fn apply(&self, u: &ScalarField, g: &ScalarField, x: Point) -> Result<f64> {
        let mut total = 0.0;
        for (&theta, &w) in self.quad.directions.iter().zip(&self.quad.weights) {
            let ranges = self.interior_ranges(x, theta)?;
            let mut s = 0.0;
            for &(a, b) in &ranges {
                for k in a..b {
                    s += self.coeffs[k] * u.eval(self.node(x, theta, k));
                }
            }
            if !g.is_known_zero() {
                self.for_exterior(&ranges, |k, c| s += c * g.eval(self.node(x, theta, k)));
            }
            total += w * s;
        }
        Ok(self.constant * self.scale * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(alpha: f64, h: f64, k2: usize, quad: DirQuadrature, dom: Domain) -> DirectionalGL {
        DirectionalGL::new(FracOrder::new(alpha).unwrap(), GLScheme::new(h, k2).unwrap(), quad, dom).unwrap()
    }

    #[test]
    fn quadrature_weights_and_exactness() {
        let q = DirQuadrature::gauss_legendre(16).unwrap();
        assert!((q.weights.iter().sum::<f64>() - TAU).abs() < 1e-13);
        assert!(q.integrate(|t| (3.0 * t).cos()).abs() < 1e-10);
        assert!((q.integrate(|t| t.sin().powi(2)) - PI).abs() < 1e-10);
        let r = q.rotated(0.3);
        assert!((r.integrate(|t| t.cos().powi(4)) - 0.75 * PI).abs() < 1e-9);
    }

    #[test]
    fn k1_rules() {
        let dom = Domain::disk(1.0).unwrap();
        let g = op(1.5, 0.01, 10, DirQuadrature::gauss_legendre(4).unwrap(), dom);
        // centred point: same count both ways, and the node at distance 1 is on the boundary
        assert_eq!(g.k1([0.0, 0.0], [1.0, 0.0]).unwrap(), 99);
        assert_eq!(g.k1([0.0, 0.0], [-1.0, 0.0]).unwrap(), 99);
        // within h of the boundary behind x
        let x = [0.995, 0.0];
        assert_eq!(g.k1(x, [-1.0, 0.0]).unwrap(), 0);
        let only = g.gl_apply_basis(&MultiquadricRBF::new(0.1).unwrap(), [0.2, 0.0], x, [-1.0, 0.0]).unwrap();
        let want = 0.01f64.powf(-1.5) * MultiquadricRBF::new(0.1).unwrap().phi(0.795);
        assert!((only - want).abs() < 1e-12 * want);
    }

    #[test]
    fn second_order_limit() {
        // order 2: (φ(x) - 2φ(x-h) + φ(x-2h))/h^2 ≈ φ'' along θ, error O(h)
        let dom = Domain::disk(1.0).unwrap();
        let rbf = MultiquadricRBF::new(0.5).unwrap();
        let theta = [0.6, 0.8];
        let x = [0.1, 0.2];
        let exact = {
            // second directional derivative of √(|y|^2 + c^2) at y = x - center
            let y: [f64; 2] = [x[0] - 0.3, x[1] + 0.1];
            let p = (y[0] * y[0] + y[1] * y[1] + 0.25).sqrt();
            let yt = y[0] * theta[0] + y[1] * theta[1];
            (1.0 - yt * yt / (p * p)) / p
        };
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3, 2.5e-3] {
            let mut gl = DirectionalGL::with_constant(2.0, 1.0, GLScheme::new(h, 4).unwrap(), DirQuadrature::gauss_legendre(1).unwrap(), dom.clone()).unwrap();
            gl.coeffs.truncate(3);
            gl.coeffs.resize(gl.k_span.max(4) + 1, 0.0);
            errs.push((gl.gl_apply_basis(&rbf, [0.3, -0.1], x, theta).unwrap() - exact).abs());
        }
        assert!(errs[0] < 0.05 && errs[1] / errs[2] > 1.8 && errs[1] / errs[2] < 2.2, "{errs:?}");
    }

    #[test]
    fn exterior_sum_and_remainder() {
        let dom = Domain::disk(1.0).unwrap();
        let g = op(1.5, 0.01, 300, DirQuadrature::gauss_legendre(4).unwrap(), dom);
        let x = [0.0, 0.0];
        assert_eq!(g.gl_exterior_correction(&ScalarField::zero(), x, [1.0, 0.0]).unwrap(), 0.0);
        // constant exterior data: Σ_{K1<k<=K2} c_k in closed form via partial sums
        let one = ScalarField::constant(1.0);
        let ext = g.gl_exterior_correction(&one, x, [1.0, 0.0]).unwrap();
        let c = g.coefficients();
        let want: f64 = c[100..=300].iter().sum::<f64>() * g.scale();
        assert!((ext - want).abs() < 1e-12 * want.abs());
        // the remainder continues the recurrence
        let rem = g.remainder(&one, x, [1.0, 0.0], 400);
        let all = gl_weights(1.5, 400);
        let want: f64 = all[301..].iter().sum::<f64>() * g.scale();
        assert!((rem - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn nonconvex_ranges_reenter() {
        let g = op(0.5, 0.1, 40, DirQuadrature::gauss_legendre(4).unwrap(), Domain::lshape());
        // -θ = (1, -0.5)/|.| from (-0.2, 0.2) crosses the notch and comes back in
        let n = 1.25f64.sqrt();
        let r = g.interior_ranges([-0.2, 0.2], [-1.0 / n, 0.5 / n]).unwrap();
        assert_eq!(r.len(), 2, "{r:?}");
        assert_eq!((r[0], r[1].0), ((0, 3), 5));
        // the exterior indices are exactly the gap plus everything past the last range up to K2
        let mut ext = Vec::new();
        g.for_exterior(&r, |k, _| ext.push(k));
        assert_eq!(&ext[..2], &[3, 4]);
        assert!(ext[2] == r[1].1 && *ext.last().unwrap() == 40);
    }

    #[test]
    fn one_d_identity() {
        // C_{α,1} = 1/(2 cos(πα/2))
        for a in [0.4, 1.6] {
            let g = op(a, 0.01, 50, DirQuadrature::one_d(), Domain::interval(1.0).unwrap());
            assert!((2.0 * g.constant() * (PI * a / 2.0).cos() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_order_is_rejected() {
        let r = DirectionalGL::new(
            FracOrder::new(1.0).unwrap(),
            GLScheme::new(0.01, 10).unwrap(),
            DirQuadrature::gauss_legendre(4).unwrap(),
            Domain::disk(1.0).unwrap(),
        );
        assert!(r.is_err());
        assert!(GLScheme::new(0.0, 1).is_err() && GLScheme::new(0.1, 0).is_err());
    }
}
