//! Fractional Laplacians on bounded domains.
//!
//! Four realizations of `(-Δ)^{α/2}` for `α ∈ (0, 2)` are provided:
//!
//! * [`spectral`]: fractional powers of the Dirichlet Laplacian through an
//!   eigenbasis, with three formulations for nonzero boundary data.
//! * [`wos`]: the integral (Riesz) operator with exterior data, solved
//!   pointwise by walk-on-spheres for α-stable processes.
//! * [`rbf`]: the same operator in its directional form, discretized by
//!   multiquadric collocation and a truncated Grünwald–Letnikov difference.
//! * [`fvm`]: the one-dimensional horizon operator and its Riesz limit on a
//!   finite-volume grid.
//!
//! [`reference`] holds closed-form solutions and a brute-force quadrature of
//! the singular integral used to validate the solvers.

pub mod constants;
pub mod domain;
pub mod error;
pub mod field;
pub mod fvm;
pub mod gl;
pub mod mesh;
pub mod order;
pub mod par;
pub mod quadrature;
pub mod rbf;
pub mod reference;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod wos;

pub use constants::{c_alpha_1d, directional_constant, occupation_mass, riesz_constant};
pub use domain::{Domain, Point};
pub use error::{FracError, Result};
pub use field::{DiffField, ScalarField, Support};
pub use gl::{gl_coefficients, GLCoefficients};
pub use mesh::TriMesh;
pub use order::FracOrder;
pub use par::Execution;
pub use special::log_gamma;
