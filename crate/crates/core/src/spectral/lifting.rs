//! Nonzero boundary data for the spectral operator: harmonic lifting,
//! arbitrary (nonharmonic) lifting, and the boundary-series form.

use super::fem::NodalGeometry;
use super::{check_power, EigenBasis, Repr, SpectralCoeffs};
use crate::domain::{Domain, Point};
use crate::error::{FracError, Result};
use crate::field::{DiffField, ScalarField};
use crate::par::{map_range, Execution};
use crate::quadrature::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

/// A field carrying the boundary values.
#[derive(Debug, Clone)]
pub enum Lift {
    Zero,
    Field(ScalarField),
    /// P1 interpolant of vertex values.
    Nodal { geometry: NodalGeometry, values: Vec<f64> },
}

impl Lift {
    pub fn eval(&self, x: Point) -> f64 {
        match self {
            Lift::Zero => 0.0,
            Lift::Field(f) => f.eval(x),
            Lift::Nodal { geometry, values } => geometry.interpolate(values, x),
        }
    }
}

/// `u = w + v`: spectral coefficients plus a lifting field.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub coeffs: SpectralCoeffs,
    pub lift: Lift,
}

impl SpectralSolution {
    pub fn eval(&self, x: Point) -> f64 {
        self.coeffs.eval(x) + self.lift.eval(x)
    }

    pub fn eval_many(&self, xs: &[Point], exec: Execution) -> Vec<f64> {
        map_range(exec, xs.len(), |i| self.eval(xs[i]))
    }

    pub fn to_field(&self) -> ScalarField {
        let s = self.clone();
        ScalarField::interior(move |x| s.eval(x))
    }

    /// Values at the mesh vertices (nodal bases only).
    pub fn nodal_values(&self) -> Option<Vec<f64>> {
        let mut w = self.coeffs.nodal_values()?;
        let geom = self.coeffs.basis.nodal_geometry()?;
        for (i, v) in w.iter_mut().enumerate() {
            *v += match &self.lift {
                Lift::Nodal { values, .. } => values[i],
                other => other.eval(geom.vertex(i)),
            };
        }
        Some(w)
    }
}

fn vanishes(g: &ScalarField, dom: &Domain) -> bool {
    g.vanishes_at(&dom.boundary_samples(256))
}

/// Harmonic function with boundary values `g`.
///
/// Intervals use the affine interpolant, rectangles a bilinear corner
/// interpolant plus one sine series per edge, disks the Poisson–Fourier
/// series, and triangle meshes the discrete harmonic P1 extension.
pub fn harmonic_lift(g: &ScalarField, dom: &Domain) -> Result<Lift> {
    if vanishes(g, dom) {
        return Ok(Lift::Zero);
    }
    match dom {
        Domain::Interval { center, half } => {
            let (a, b) = (center - half, center + half);
            let (ga, gb) = (g.eval_1d(a), g.eval_1d(b));
            Ok(Lift::Field(ScalarField::from_1d(move |x| ga + (gb - ga) * (x - a) / (b - a))))
        }
        Domain::Rectangle { center, half } => {
            let lift = RectHarmonic::new(g, [center[0] - half[0], center[1] - half[1]], [2.0 * half[0], 2.0 * half[1]], 128);
            Ok(Lift::Field(ScalarField::whole_space(move |x| lift.eval(x))))
        }
        Domain::Disk { center, radius } => {
            let lift = DiskHarmonic::new(g, *center, *radius, 128);
            Ok(Lift::Field(ScalarField::whole_space(move |x| lift.eval(x))))
        }
        Domain::TriMesh(mesh) => {
            let geometry = NodalGeometry::Mesh(mesh.clone());
            let values = discrete_harmonic(&geometry, g)?;
            Ok(Lift::Nodal { geometry, values })
        }
        Domain::LShape => Err(FracError::Unsupported(
            "harmonic lifting on the L-shape needs a triangle mesh domain".into(),
        )),
    }
}

fn discrete_harmonic(geometry: &NodalGeometry, g: &ScalarField) -> Result<Vec<f64>> {
    let n = geometry.num_vertices();
    let (a, _) = geometry.assemble();
    let dofs: Vec<usize> = (0..n).filter(|&i| !geometry.is_boundary(i)).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &d) in dofs.iter().enumerate() {
        pos[d] = i;
    }
    let mut values: Vec<f64> =
        (0..n).map(|i| if geometry.is_boundary(i) { g.eval(geometry.vertex(i)) } else { 0.0 }).collect();
    let m = dofs.len();
    let mut k = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &d) in dofs.iter().enumerate() {
        for &(c, v) in &a[d] {
            if pos[c] != usize::MAX {
                k[(i, pos[c])] = v;
            } else {
                rhs[i] -= v * values[c];
            }
        }
    }
    let sol = k
        .cholesky()
        .ok_or_else(|| FracError::Mesh("stiffness matrix is not positive definite".into()))?
        .solve(&rhs);
    for (i, &d) in dofs.iter().enumerate() {
        values[d] = sol[i];
    }
    Ok(values)
}

/// `sinh(a) / sinh(b)` for `0 <= a <= b` without overflow.
fn sinh_ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    (a - b).exp() * (-(-2.0 * a).exp_m1()) / (-(-2.0 * b).exp_m1())
}

fn sine_coefficients(r: impl Fn(f64) -> f64, modes: usize) -> Vec<f64> {
    let gl = GaussLegendre::new(4 * modes + 64);
    let (s, w) = gl.mapped(0.0, 1.0);
    let vals: Vec<f64> = s.iter().map(|&t| r(t)).collect();
    (1..=modes)
        .map(|n| {
            2.0 * s
                .iter()
                .zip(&w)
                .zip(&vals)
                .map(|((&t, &w), &v)| w * v * (n as f64 * PI * t).sin())
                .sum::<f64>()
        })
        .collect()
}

struct RectHarmonic {
    lo: Point,
    len: [f64; 2],
    corners: [f64; 4],
    /// bottom, top, left, right edge coefficients
    edges: [Vec<f64>; 4],
}

impl RectHarmonic {
    fn new(g: &ScalarField, lo: Point, len: [f64; 2], modes: usize) -> Self {
        let at = |s: f64, t: f64| g.eval([lo[0] + s * len[0], lo[1] + t * len[1]]);
        let corners = [at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0), at(1.0, 1.0)];
        let bil = move |s: f64, t: f64| {
            corners[0] * (1.0 - s) * (1.0 - t) + corners[1] * s * (1.0 - t) + corners[2] * (1.0 - s) * t + corners[3] * s * t
        };
        let edges = [
            sine_coefficients(|s| at(s, 0.0) - bil(s, 0.0), modes),
            sine_coefficients(|s| at(s, 1.0) - bil(s, 1.0), modes),
            sine_coefficients(|t| at(0.0, t) - bil(0.0, t), modes),
            sine_coefficients(|t| at(1.0, t) - bil(1.0, t), modes),
        ];
        RectHarmonic { lo, len, corners, edges }
    }

    fn eval(&self, x: Point) -> f64 {
        let s = ((x[0] - self.lo[0]) / self.len[0]).clamp(0.0, 1.0);
        let t = ((x[1] - self.lo[1]) / self.len[1]).clamp(0.0, 1.0);
        let c = &self.corners;
        let mut v = c[0] * (1.0 - s) * (1.0 - t) + c[1] * s * (1.0 - t) + c[2] * (1.0 - s) * t + c[3] * s * t;
        let (lx, ly) = (self.len[0], self.len[1]);
        for n in 1..=self.edges[0].len() {
            let k = n as f64 * PI;
            let (sx, sy) = ((k * s).sin(), (k * t).sin());
            let hb = k * ly / lx;
            let hl = k * lx / ly;
            v += self.edges[0][n - 1] * sx * sinh_ratio(k * (1.0 - t) * ly / lx, hb);
            v += self.edges[1][n - 1] * sx * sinh_ratio(k * t * ly / lx, hb);
            v += self.edges[2][n - 1] * sy * sinh_ratio(k * (1.0 - s) * lx / ly, hl);
            v += self.edges[3][n - 1] * sy * sinh_ratio(k * s * lx / ly, hl);
        }
        v
    }
}

struct DiskHarmonic {
    center: Point,
    r: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl DiskHarmonic {
    fn new(g: &ScalarField, center: Point, r: f64, modes: usize) -> Self {
        let n = 4 * modes + 16;
        let vals: Vec<(f64, f64)> = (0..n)
            .map(|l| {
                let p = 2.0 * PI * l as f64 / n as f64;
                (p, g.eval([center[0] + r * p.cos(), center[1] + r * p.sin()]))
            })
            .collect();
        let mut cos = Vec::with_capacity(modes + 1);
        let mut sin = Vec::with_capacity(modes + 1);
        for m in 0..=modes {
            let (mut a, mut b) = (0.0, 0.0);
            for &(p, v) in &vals {
                let (s, c) = (m as f64 * p).sin_cos();
                a += v * c;
                b += v * s;
            }
            let scale = if m == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
            cos.push(a * scale);
            sin.push(b * scale);
        }
        DiskHarmonic { center, r, cos, sin }
    }

    fn eval(&self, x: Point) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let q = (dx.hypot(dy) / self.r).min(1.0);
        let phi = dy.atan2(dx);
        let mut v = self.cos[0];
        let mut qm = 1.0;
        for m in 1..self.cos.len() {
            qm *= q;
            let (s, c) = (m as f64 * phi).sin_cos();
            v += qm * (self.cos[m] * c + self.sin[m] * s);
        }
        v
    }
}

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s <= 2.0 {
        Ok(())
    } else {
        Err(FracError::InvalidParameter(format!("order must lie in (0, 2], got {s}")))
    }
}

/// `(u - z, e_k)` for all modes, where `z` is the lift.
pub(crate) fn project_minus_lift(basis: &EigenBasis, u: &ScalarField, lift: &Lift) -> Vec<f64> {
    match (lift, &basis.repr) {
        (Lift::Zero, _) => basis.project(u),
        (Lift::Nodal { values, .. }, Repr::Nodal(b)) => b.project(&|x| u.eval(x), Some(values)),
        _ => basis.project_fn(&|x| u.eval(x) - lift.eval(x)),
    }
}

/// Solves `(-Δ_{Ω,g})^{s/2} u = f`, `u = g` on the boundary, as `u = a + b`
/// with `a` the zero-boundary solution and `b` the harmonic lift of `g`.
/// `s ∈ (0, 2]`; `s = 2` is the classical Poisson problem.
pub fn solve_inhomogeneous_lifting(
    f: &ScalarField,
    g: &ScalarField,
    basis: &Arc<EigenBasis>,
    s: f64,
) -> Result<SpectralSolution> {
    check_order(s)?;
    let coeffs = super::solve_homogeneous_power(f, basis, s);
    let lift = harmonic_lift(g, basis.domain())?;
    Ok(SpectralSolution { coeffs, lift })
}

/// Same problem with an arbitrary lifting `v` (`v = g` on the boundary):
/// `w_k = [(f, e_k) - λ_k^{s/2-1} (∇v, ∇e_k)] / λ_k^{s/2}` and `u = w + v`.
///
/// With a nodal basis `v` enters through its P1 interpolant.
pub fn solve_inhomogeneous_nonharmonic(
    f: &ScalarField,
    g: &ScalarField,
    v: &DiffField,
    basis: &Arc<EigenBasis>,
    s: f64,
) -> Result<SpectralSolution> {
    check_order(s)?;
    let probes: Vec<Point> = match basis.nodal_geometry() {
        Some(geom) => (0..geom.num_vertices())
            .filter(|&i| geom.is_boundary(i))
            .map(|i| geom.vertex(i))
            .collect(),
        None => basis.domain().boundary_samples(256),
    };
    for p in &probes {
        let d = (v.value.eval(*p) - g.eval(*p)).abs();
        if d > 1e-8 {
            return Err(FracError::BoundaryMismatch(format!(
                "lifting differs from the boundary data by {d:e} at ({}, {})",
                p[0], p[1]
            )));
        }
    }
    let fk = basis.project(f);
    let gk = basis.project_gradient(v);
    let coeffs = fk
        .iter()
        .zip(&gk)
        .zip(basis.eigenvalues())
        .map(|((&fk, &gk), &l)| (fk - l.powf(0.5 * s - 1.0) * gk) / l.powf(0.5 * s))
        .collect();
    let lift = match basis.nodal_geometry() {
        Some(geom) => Lift::Nodal {
            geometry: geom.clone(),
            values: (0..geom.num_vertices()).map(|i| v.value.eval(geom.vertex(i))).collect(),
        },
        None => Lift::Field(v.value.clone()),
    };
    Ok(SpectralSolution { coeffs: SpectralCoeffs { basis: basis.clone(), coeffs }, lift })
}

/// Coefficients of `(-Δ_{Ω,g})^{s/2} u = Σ λ_k^{s/2} (u - z, e_k) e_k` with `z`
/// the harmonic lift of `g`.
pub fn apply_fraclap_inhomogeneous(
    u: &ScalarField,
    g: &ScalarField,
    basis: &Arc<EigenBasis>,
    s: f64,
) -> Result<SpectralCoeffs> {
    check_power(s)?;
    let lift = harmonic_lift(g, basis.domain())?;
    let c = project_minus_lift(basis, u, &lift);
    Ok(SpectralCoeffs { basis: basis.clone(), coeffs: c }.power(s))
}

/// Interval-only form with explicit boundary terms,
/// `λ_k^{s/2} (u, e_k) + λ_k^{s/2-1} [g(b) e_k'(b) - g(a) e_k'(a)]`.
pub fn apply_fraclap_boundary_series_interval(
    u: &ScalarField,
    g: &ScalarField,
    basis: &Arc<EigenBasis>,
    s: f64,
) -> Result<SpectralCoeffs> {
    check_power(s)?;
    let Repr::Interval(b) = &basis.repr else {
        return Err(FracError::Unsupported("boundary series needs the analytic interval basis".into()));
    };
    let Domain::Interval { center, half } = *basis.domain() else { unreachable!() };
    let (xa, xb) = (center - half, center + half);
    let (ga, gb) = (g.eval_1d(xa), g.eval_1d(xb));
    let uk = basis.project(u);
    let coeffs = uk
        .iter()
        .zip(basis.eigenvalues())
        .enumerate()
        .map(|(k, (&c, &l))| {
            let bd = gb * b.mode_deriv(k, xb) - ga * b.mode_deriv(k, xa);
            l.powf(0.5 * s) * c + l.powf(0.5 * s - 1.0) * bd
        })
        .collect();
    Ok(SpectralCoeffs { basis: basis.clone(), coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;

    #[test]
    fn interval_lift_is_affine() {
        let dom = Domain::interval(1.0).unwrap();
        let g = ScalarField::from_1d(|x| x);
        let z = harmonic_lift(&g, &dom).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.8] {
            assert!((z.eval([x, 0.0]) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn disk_constant_data() {
        let dom = Domain::disk(1.0).unwrap();
        let z = harmonic_lift(&ScalarField::constant(1.0), &dom).unwrap();
        for x in [[0.0, 0.0], [0.3, -0.5], [0.9, 0.1]] {
            assert!((z.eval(x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rectangle_lift_reproduces_harmonic_data() {
        let dom = Domain::rectangle_centered([0.5, 0.5], 0.5, 0.5).unwrap();
        // x² - y² + 3xy is harmonic; the lift must reproduce it.
        let h = |p: Point| p[0] * p[0] - p[1] * p[1] + 3.0 * p[0] * p[1];
        let z = harmonic_lift(&ScalarField::whole_space(h), &dom).unwrap();
        for x in [[0.5, 0.5], [0.2, 0.7], [0.9, 0.95]] {
            assert!((z.eval(x) - h(x)).abs() < 1e-6, "{x:?}");
        }
    }

    #[test]
    fn square_exp_lift_agrees_with_mesh_lift() {
        let g = ScalarField::whole_space(|p| (-(p[0] * p[0] + p[1] * p[1])).exp());
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        let series = harmonic_lift(&g, &sq).unwrap();
        let mesh = Domain::mesh(TriMesh::rectangle([-1.0, -1.0], [1.0, 1.0], 64, 64).unwrap());
        let fem = harmonic_lift(&g, &mesh).unwrap();
        let c = series.eval([0.0, 0.0]);
        assert!((c - fem.eval([0.0, 0.0])).abs() < 1e-3);
        // mean-value property: centre value close to the boundary average
        let avg: f64 = sq.boundary_samples(4000).iter().map(|&p| g.eval(p)).sum::<f64>() / 4000.0;
        assert!((c - avg).abs() < 0.05);
    }

    #[test]
    fn boundary_series_matches_lifting_route() {
        let basis = Arc::new(EigenBasis::interval(1.0, 400).unwrap());
        let u = ScalarField::from_1d(|x| x + (1.0 - x * x) * x.cos());
        let g = ScalarField::from_1d(|x| x);
        let a = apply_fraclap_inhomogeneous(&u, &g, &basis, 1.3).unwrap();
        let b = apply_fraclap_boundary_series_interval(&u, &g, &basis, 1.3).unwrap();
        for (p, q) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((p - q).abs() < 1e-9 * q.abs().max(1.0));
        }
    }

    #[test]
    fn nonharmonic_lifting_is_exact_with_a_complete_mesh_basis() {
        let dom = Domain::interval(1.0).unwrap();
        let basis = Arc::new(EigenBasis::fem_interval(&dom, 128, None).unwrap());
        let g = ScalarField::from_1d(|x| x);
        let f = ScalarField::from_1d(|x| -x);
        for s in [0.2, 1.0, 1.9, 2.0] {
            let h = solve_inhomogeneous_lifting(&f, &g, &basis, s).unwrap().nodal_values().unwrap();
            for v in [DiffField::new(|p| p[0], |_| [1.0, 0.0]), DiffField::new(|p| p[0].powi(3), |p| [3.0 * p[0] * p[0], 0.0])] {
                let n = solve_inhomogeneous_nonharmonic(&f, &g, &v, &basis, s).unwrap().nodal_values().unwrap();
                let d = h.iter().zip(&n).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                assert!(d < 1e-12, "s={s}: {d}");
            }
        }
        // classical limit: nodally exact x³/6 + 5x/6
        let u = solve_inhomogeneous_lifting(&f, &g, &basis, 2.0).unwrap().nodal_values().unwrap();
        for (i, v) in u.iter().enumerate() {
            let x = -1.0 + i as f64 / 64.0;
            assert!((v - (x.powi(3) / 6.0 + 5.0 * x / 6.0)).abs() < 1e-12, "{x}: {v}");
        }
    }

    #[test]
    fn nonharmonic_rejects_mismatched_lifting() {
        let basis = Arc::new(EigenBasis::interval(1.0, 16).unwrap());
        let g = ScalarField::from_1d(|x| x);
        let v = DiffField::new(|p| p[0] * p[0], |p| [2.0 * p[0], 0.0]);
        let r = solve_inhomogeneous_nonharmonic(&ScalarField::zero(), &g, &v, &basis, 1.5);
        assert!(matches!(r, Err(FracError::BoundaryMismatch(_))));
    }
}
