//! Spectral fractional Laplacian through the Dirichlet eigenbasis of `-Δ`.
//!
//! Bases are either analytic (interval, rectangle, disk) or nodal P1 bases
//! from the discrete eigenproblem `A φ = λ M φ` on a mesh. Inhomogeneous
//! boundary data are handled by lifting (harmonic or arbitrary) or through
//! the heat semigroup; see [`lifting`] and [`heat`].

mod analytic;
mod fem;
pub mod heat;
pub mod lifting;

pub use fem::NodalGeometry;
pub use heat::{apply_fraclap_heatsg, HeatSGConfig, HeatSgOutput, Propagation, TimeGrid};
pub use lifting::{
    apply_fraclap_boundary_series_interval, apply_fraclap_inhomogeneous, harmonic_lift,
    solve_inhomogeneous_lifting, solve_inhomogeneous_nonharmonic, Lift, SpectralSolution,
};

use crate::domain::{Domain, Point};
use crate::error::{FracError, Result};
use crate::field::{DiffField, ScalarField};
use crate::order::FracOrder;
use crate::par::{map_range, Execution};
use std::sync::Arc;

use analytic::{DiskBasis, IntervalBasis, RectBasis};
use fem::NodalBasis;

#[derive(Debug, Clone)]
enum Repr {
    Interval(IntervalBasis),
    Rectangle(RectBasis),
    Disk(DiskBasis),
    Nodal(NodalBasis),
}

/// Ordered eigenpairs `(λ_k, e_k)` of the Dirichlet Laplacian, `L²`-orthonormal.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    domain: Domain,
    eigenvalues: Vec<f64>,
    repr: Repr,
}

impl EigenBasis {
    /// Sine basis of `(-half, half)` with `k` modes.
    pub fn interval(half: f64, k: usize) -> Result<Self> {
        Self::analytic(&Domain::interval(half)?, k)
    }

    /// Tensor sine basis of `(-ax, ax) x (-ay, ay)`, the `k` lowest modes.
    pub fn rectangle(ax: f64, ay: f64, k: usize) -> Result<Self> {
        Self::analytic(&Domain::rectangle(ax, ay)?, k)
    }

    /// Fourier–Bessel basis of the disk of radius `r`, the `k` lowest modes.
    pub fn disk(r: f64, k: usize) -> Result<Self> {
        Self::analytic(&Domain::disk(r)?, k)
    }

    /// Closed-form basis for intervals, rectangles and disks.
    pub fn analytic(domain: &Domain, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(FracError::InvalidParameter("basis needs at least one mode".into()));
        }
        let (eigenvalues, repr) = match *domain {
            Domain::Interval { center, half } => {
                let b = IntervalBasis::new(center - half, 2.0 * half, k);
                (b.eigenvalues(), Repr::Interval(b))
            }
            Domain::Rectangle { center, half } => {
                let b = RectBasis::new([center[0] - half[0], center[1] - half[1]], [2.0 * half[0], 2.0 * half[1]], k);
                (b.eigenvalues(), Repr::Rectangle(b))
            }
            Domain::Disk { center, radius } => {
                let b = DiskBasis::new(center, radius, k);
                (b.eigenvalues(), Repr::Disk(b))
            }
            _ => {
                return Err(FracError::Unsupported(format!(
                    "no closed-form eigenbasis on a {}; use a mesh basis",
                    domain.name()
                )))
            }
        };
        Ok(EigenBasis { domain: domain.clone(), eigenvalues, repr })
    }

    /// Discrete P1 eigenbasis on a triangle mesh (`k` lowest pairs).
    pub fn fem(mesh: Arc<crate::mesh::TriMesh>, k: usize) -> Result<Self> {
        let b = NodalBasis::triangles(mesh.clone(), k)?;
        Ok(EigenBasis { domain: Domain::TriMesh(mesh), eigenvalues: b.eigenvalues.clone(), repr: Repr::Nodal(b) })
    }

    /// Discrete P1 eigenbasis on a uniform mesh of an interval with `cells`
    /// cells; `k = None` keeps all `cells - 1` modes.
    pub fn fem_interval(domain: &Domain, cells: usize, k: Option<usize>) -> Result<Self> {
        let Domain::Interval { center, half } = *domain else {
            return Err(FracError::Unsupported("1D mesh basis needs an interval".into()));
        };
        let b = NodalBasis::line(center - half, center + half, cells, k)?;
        Ok(EigenBasis { domain: domain.clone(), eigenvalues: b.eigenvalues.clone(), repr: Repr::Nodal(b) })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn is_nodal(&self) -> bool {
        matches!(self.repr, Repr::Nodal(_))
    }

    pub fn nodal_geometry(&self) -> Option<&NodalGeometry> {
        match &self.repr {
            Repr::Nodal(b) => Some(&b.geometry),
            _ => None,
        }
    }

    /// Value of the `k`-th eigenfunction (0-based) at `x`.
    pub fn eval_mode(&self, k: usize, x: Point) -> f64 {
        match &self.repr {
            Repr::Interval(b) => b.mode(k, x[0]),
            Repr::Rectangle(b) => b.mode(k, x),
            Repr::Disk(b) => b.mode(k, x),
            Repr::Nodal(b) => b.mode(k, x),
        }
    }

    /// Inner products `(f, e_k)` for all modes.
    pub fn project(&self, f: &ScalarField) -> Vec<f64> {
        self.project_fn(&|x| f.eval(x))
    }

    pub(crate) fn project_fn(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        match &self.repr {
            Repr::Interval(b) => b.project(f),
            Repr::Rectangle(b) => b.project(f),
            Repr::Disk(b) => b.project(f),
            Repr::Nodal(b) => b.project(f, None),
        }
    }

    /// `(∇v, ∇e_k)` for all modes.
    pub fn project_gradient(&self, v: &DiffField) -> Vec<f64> {
        match &self.repr {
            Repr::Interval(b) => b.project_gradient(v),
            Repr::Rectangle(b) => b.project_gradient(v),
            Repr::Disk(b) => b.project_gradient(v),
            Repr::Nodal(b) => b.project_gradient(v),
        }
    }

    /// Gram matrix entry `(e_i, e_j)` under the basis quadrature.
    pub fn gram(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Nodal(b) => b.gram(i, j),
            _ => {
                let ei = |x: Point| self.eval_mode(i, x);
                let ej = |x: Point| self.eval_mode(j, x);
                self.inner(&ei, &ej)
            }
        }
    }

    fn inner(&self, a: &(dyn Fn(Point) -> f64 + Sync), b: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
        match &self.repr {
            Repr::Interval(bs) => bs.integrate(&|x| a(x) * b(x)),
            Repr::Rectangle(bs) => bs.integrate(&|x| a(x) * b(x)),
            Repr::Disk(bs) => bs.integrate(&|x| a(x) * b(x)),
            Repr::Nodal(_) => unreachable!("nodal Gram entries use the mass matrix"),
        }
    }

    /// Evaluates `Σ c_k e_k(x)`.
    pub fn eval_series(&self, coeffs: &[f64], x: Point) -> f64 {
        match &self.repr {
            Repr::Interval(b) => b.series(coeffs, x[0]),
            Repr::Rectangle(b) => b.series(coeffs, x),
            Repr::Disk(b) => b.series(coeffs, x),
            Repr::Nodal(b) => b.series(coeffs, x),
        }
    }
}

/// Coefficients of a field in an eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralCoeffs {
    pub basis: Arc<EigenBasis>,
    pub coeffs: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn eval(&self, x: Point) -> f64 {
        self.basis.eval_series(&self.coeffs, x)
    }

    pub fn eval_many(&self, xs: &[Point], exec: Execution) -> Vec<f64> {
        map_range(exec, xs.len(), |i| self.eval(xs[i]))
    }

    /// Values at the mesh vertices (nodal bases only).
    pub fn nodal_values(&self) -> Option<Vec<f64>> {
        match &self.basis.repr {
            Repr::Nodal(b) => Some(b.vertex_values(&self.coeffs)),
            _ => None,
        }
    }

    pub fn to_field(&self) -> ScalarField {
        let s = self.clone();
        ScalarField::interior(move |x| s.eval(x))
    }

    /// Applies `(-Δ)^{s/2}` diagonally, returning new coefficients.
    pub fn power(&self, s: f64) -> SpectralCoeffs {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.basis.eigenvalues())
            .map(|(&c, &l)| c * l.powf(0.5 * s))
            .collect();
        SpectralCoeffs { basis: self.basis.clone(), coeffs }
    }
}

fn check_power(s: f64) -> Result<()> {
    if s.is_finite() && s > -2.0 && s <= 2.0 {
        Ok(())
    } else {
        Err(FracError::InvalidParameter(format!("spectral power must lie in (-2, 2], got {s}")))
    }
}

/// Coefficients of `(-Δ_0)^{s/2} u`: `λ_k^{s/2} (u, e_k)`, with `s ∈ (-2, 2]`.
pub fn apply_fraclap(u: &ScalarField, basis: &Arc<EigenBasis>, s: f64) -> Result<SpectralCoeffs> {
    check_power(s)?;
    let c = basis.project(u);
    Ok(SpectralCoeffs { basis: basis.clone(), coeffs: c }.power(s))
}

/// Solution of `(-Δ_0)^{α/2} u = f` with zero boundary values.
pub fn solve_homogeneous(f: &ScalarField, basis: &Arc<EigenBasis>, alpha: FracOrder) -> SpectralCoeffs {
    solve_homogeneous_power(f, basis, alpha.value())
}

/// As [`solve_homogeneous`] but for any power in `(0, 2]`, including the local case `s = 2`.
pub fn solve_homogeneous_power(f: &ScalarField, basis: &Arc<EigenBasis>, s: f64) -> SpectralCoeffs {
    let c = basis.project(f);
    SpectralCoeffs { basis: basis.clone(), coeffs: c }.power(-s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn arc(b: EigenBasis) -> Arc<EigenBasis> {
        Arc::new(b)
    }

    #[test]
    fn interval_eigenpairs() {
        let b = EigenBasis::interval(1.0, 2).unwrap();
        assert!((b.eigenvalues()[0] - PI * PI / 4.0).abs() < 1e-14);
        assert!((b.eigenvalues()[1] - PI * PI).abs() < 1e-13);
        let x = [0.3, 0.0];
        assert!((b.eval_mode(1, x) + (PI * 0.3).sin()).abs() < 1e-14);
        assert!(b.gram(0, 1).abs() < 1e-14);
        assert!((b.gram(0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rectangle_eigenpairs() {
        let b = EigenBasis::rectangle(1.0, 1.0, 10).unwrap();
        let l = b.eigenvalues();
        assert!((l[0] - PI * PI / 2.0).abs() < 1e-13);
        assert!((l[1] - 5.0 * PI * PI / 4.0).abs() < 1e-13);
        assert_eq!(l[1], l[2]);
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b.gram(i, j) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn disk_eigenpairs() {
        let b = EigenBasis::disk(1.0, 12).unwrap();
        let l = b.eigenvalues();
        assert!((l[0] - 2.404_825_557_695_772_769f64.powi(2)).abs() < 1e-12);
        assert!((l[1] - 3.831_705_970_207_512_316f64.powi(2)).abs() < 1e-12);
        assert_eq!(l[1], l[2]);
        for i in 0..12 {
            for j in 0..12 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b.gram(i, j) - want).abs() < 1e-10, "{i} {j}");
            }
        }
        let b2 = EigenBasis::disk(2.0, 12).unwrap();
        for (a, c) in l.iter().zip(b2.eigenvalues()) {
            assert!((a / 4.0 - c).abs() < 1e-12 * a);
        }
        assert!(b.eval_mode(3, [0.6, 0.8]).abs() < 1e-12);
    }

    #[test]
    fn eigenfunction_power() {
        let b = arc(EigenBasis::interval(1.0, 16).unwrap());
        let e1 = {
            let bb = b.clone();
            ScalarField::interior(move |x| bb.eval_mode(0, x))
        };
        let c = apply_fraclap(&e1, &b, 1.0).unwrap();
        assert!((c.coeffs[0] - PI / 2.0).abs() < 1e-13);
        assert!(c.coeffs[1..].iter().all(|v| v.abs() < 1e-13));
        let s = ScalarField::from_1d(|x| (PI * x).sin());
        let c = apply_fraclap(&s, &b, 1.5).unwrap();
        assert!((c.coeffs[1].abs() - PI.powf(1.5)).abs() < 1e-12);
        let c0 = apply_fraclap(&s, &b, 0.0).unwrap();
        assert_eq!(c0.coeffs, b.project(&s));
        assert!(apply_fraclap(&s, &b, 2.5).is_err());
    }

    #[test]
    fn homogeneous_solves() {
        let b = arc(EigenBasis::interval(1.0, 64).unwrap());
        let s = ScalarField::from_1d(|x| (PI * x).sin());
        let u = solve_homogeneous(&s, &b, FracOrder::new(1.5).unwrap());
        assert!((u.eval([0.5, 0.0]) - 0.179_587_122_125_166_561_7).abs() < 1e-12);
        assert!(u.eval([1.0, 0.0]).abs() < 1e-14);
        let one = ScalarField::constant(1.0);
        let mesh = arc(EigenBasis::fem_interval(&Domain::interval(1.0).unwrap(), 64, None).unwrap());
        let u = solve_homogeneous_power(&one, &mesh, 2.0);
        assert!((u.eval([0.0, 0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_and_composition_identities() {
        let b = arc(EigenBasis::rectangle(1.0, 0.5, 40).unwrap());
        let f = ScalarField::whole_space(|x| (x[0] * 3.0).cos() * (1.0 - x[1] * x[1]) + x[0] * x[1]);
        let alpha = FracOrder::new(0.7).unwrap();
        let u = solve_homogeneous(&f, &b, alpha);
        let back = u.power(alpha.value());
        let proj = b.project(&f);
        for (a, p) in back.coeffs.iter().zip(&proj) {
            assert!((a - p).abs() < 1e-10);
        }
        let c = SpectralCoeffs { basis: b.clone(), coeffs: proj };
        let two = c.power(0.6).power(0.9);
        let one = c.power(1.5);
        for (a, p) in two.coeffs.iter().zip(&one.coeffs) {
            assert!((a - p).abs() < 1e-10 * p.abs().max(1.0));
        }
    }
}
