//! Multiquadric collocation for the Riesz problem in directional form,
//!
//! `(-Δ)^{α/2} u(x) = C_{α,d} ∫_{|θ|=1} D^α_θ u(x) dθ`,
//!
//! with `u(x) ≈ Σ_j λ_j √(|x - x_j|^2 + c^2)` inside the domain and `u = g`
//! outside. Each fractional directional derivative is replaced by a
//! truncated Grünwald–Letnikov difference whose exterior terms move to the
//! right-hand side, and the direction integral by Gauss–Legendre quadrature
//! on `[0, 2π]`. Boundary points carry interpolation rows.
//!
//! The collocation matrix is dense and its condition number grows quickly
//! with the number of points; it is reported, not mitigated.

mod collocation;
mod directional;
mod lu;
mod system;

pub use collocation::{
    generate_disk_points, generate_interval_points, generate_lshape_points, generate_square_points, CollocationSet, Generator, MultiquadricRBF,
};
pub use directional::{DirQuadrature, DirectionalGL, GLScheme};
pub use lu::{DenseLu, PIVOT_FLOOR};
pub use system::{assemble, assemble_rhs, evaluate, solve_system, CollocationSystem, FactoredSystem, RbfSolution};

use crate::domain::Domain;
use crate::error::Result;
use crate::field::ScalarField;
use crate::order::FracOrder;
use crate::par::Execution;

/// A complete discretization: points, basis, difference and direction rule.
#[derive(Debug, Clone)]
pub struct RbfSetup {
    pub colloc: CollocationSet,
    pub rbf: MultiquadricRBF,
    pub op: DirectionalGL,
}

impl RbfSetup {
    pub fn new(colloc: CollocationSet, rbf: MultiquadricRBF, alpha: FracOrder, scheme: GLScheme, quad: DirQuadrature, domain: Domain) -> Result<Self> {
        Ok(RbfSetup { colloc, rbf, op: DirectionalGL::new(alpha, scheme, quad, domain)? })
    }

    /// Unit disk with the polar grid of size `i`, `c = 3/I`, `P = 16`.
    pub fn disk(i: usize, alpha: FracOrder, h: f64, k2: usize) -> Result<Self> {
        Self::new(
            generate_disk_points(i)?,
            MultiquadricRBF::new(3.0 / i as f64)?,
            alpha,
            GLScheme::new(h, k2)?,
            DirQuadrature::gauss_legendre(16)?,
            Domain::disk(1.0)?,
        )
    }

    /// `[-1, 1]^2` with an `n × n` grid, `c = 0.05`, `P = 16`.
    pub fn square(n: usize, alpha: FracOrder, h: f64, k2: usize) -> Result<Self> {
        Self::new(
            generate_square_points(n, 1.0)?,
            MultiquadricRBF::new(0.05)?,
            alpha,
            GLScheme::new(h, k2)?,
            DirQuadrature::gauss_legendre(16)?,
            Domain::rectangle(1.0, 1.0)?,
        )
    }

    /// L-shape on the `n × n` grid of `[-1, 1]^2`, `c` equal to the grid
    /// spacing, `P = 16`.
    pub fn lshape(n: usize, alpha: FracOrder, h: f64, k2: usize) -> Result<Self> {
        Self::new(
            generate_lshape_points(n)?,
            MultiquadricRBF::new(2.0 / (n as f64 - 1.0))?,
            alpha,
            GLScheme::new(h, k2)?,
            DirQuadrature::gauss_legendre(16)?,
            Domain::lshape(),
        )
    }

    /// `(-half, half)` with `n` uniform points, `c` equal to the spacing and
    /// the two-point direction rule.
    pub fn interval(n: usize, half: f64, alpha: FracOrder, h: f64, k2: usize) -> Result<Self> {
        Self::new(
            generate_interval_points(n, half)?,
            MultiquadricRBF::new(2.0 * half / (n as f64 - 1.0))?,
            alpha,
            GLScheme::new(h, k2)?,
            DirQuadrature::one_d(),
            Domain::interval(half)?,
        )
    }

    pub fn assemble(&self, f: &ScalarField, g: &ScalarField, exec: Execution) -> Result<CollocationSystem> {
        assemble(&self.colloc, &self.rbf, &self.op, f, g, exec)
    }

    pub fn solve(&self, f: &ScalarField, g: &ScalarField, exec: Execution) -> Result<RbfSolution> {
        solve_system(&self.assemble(f, g, exec)?)
    }
}
