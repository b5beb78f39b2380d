//! Discrete P1 eigenbases: `A φ = λ M φ` over the interior vertices of a
//! triangle mesh or of a uniform interval mesh.

use crate::domain::Point;
use crate::error::{FracError, Result};
use crate::field::DiffField;
use crate::mesh::TriMesh;
use crate::quadrature::{triangle_rule_7, GaussLegendre};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

/// Vertex layout of a nodal basis.
#[derive(Debug, Clone)]
pub enum NodalGeometry {
    /// Uniform nodes `a + i h`, `i = 0..=cells`.
    Line { a: f64, h: f64, cells: usize },
    Mesh(Arc<TriMesh>),
}

impl NodalGeometry {
    pub fn num_vertices(&self) -> usize {
        match self {
            NodalGeometry::Line { cells, .. } => cells + 1,
            NodalGeometry::Mesh(m) => m.num_vertices(),
        }
    }

    pub fn vertex(&self, i: usize) -> Point {
        match self {
            NodalGeometry::Line { a, h, .. } => [a + i as f64 * h, 0.0],
            NodalGeometry::Mesh(m) => m.vertices[i],
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        match self {
            NodalGeometry::Line { cells, .. } => i == 0 || i == *cells,
            NodalGeometry::Mesh(m) => m.boundary[i],
        }
    }

    /// Vertices and weights of the P1 hat functions that are nonzero at `x`.
    pub fn hats_at(&self, x: Point) -> Option<Vec<(usize, f64)>> {
        match self {
            NodalGeometry::Line { a, h, cells } => {
                let t = (x[0] - a) / h;
                if t < -1e-12 || t > *cells as f64 + 1e-12 {
                    return None;
                }
                let e = (t.floor().max(0.0) as usize).min(cells - 1);
                let s = (t - e as f64).clamp(0.0, 1.0);
                Some(vec![(e, 1.0 - s), (e + 1, s)])
            }
            NodalGeometry::Mesh(m) => m.locate(x).map(|(t, l)| {
                let tri = m.triangles[t];
                vec![(tri[0], l[0]), (tri[1], l[1]), (tri[2], l[2])]
            }),
        }
    }

    /// P1 interpolant of vertex values at `x` (zero outside).
    pub fn interpolate(&self, vals: &[f64], x: Point) -> f64 {
        self.hats_at(x).map_or(0.0, |h| h.iter().map(|&(i, w)| w * vals[i]).sum())
    }

    /// Visits quadrature points as `(point, weight, [(vertex, hat value)])`.
    pub(crate) fn for_each_qp(&self, mut visit: impl FnMut(Point, f64, &[(usize, f64)])) {
        match self {
            NodalGeometry::Line { a, h, cells } => {
                let gl = GaussLegendre::new(4);
                for e in 0..*cells {
                    let x0 = a + e as f64 * h;
                    for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                        let s = 0.5 * (t + 1.0);
                        visit([x0 + s * h, 0.0], 0.5 * w * h, &[(e, 1.0 - s), (e + 1, s)]);
                    }
                }
            }
            NodalGeometry::Mesh(m) => {
                let rule = triangle_rule_7();
                for t in &m.triangles {
                    let area = m.triangle_area(t);
                    let p = [m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]];
                    for (l, w) in rule.iter() {
                        let x = [
                            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
                        ];
                        visit(x, w * area, &[(t[0], l[0]), (t[1], l[1]), (t[2], l[2])]);
                    }
                }
            }
        }
    }

    /// Sparse stiffness and mass matrices over all vertices, row-wise `(col, value)`.
    pub(crate) fn assemble(&self) -> (Vec<Vec<(usize, f64)>>, Vec<Vec<(usize, f64)>>) {
        let n = self.num_vertices();
        let mut a: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut mm: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let add = |rows: &mut Vec<Vec<(usize, f64)>>, i: usize, j: usize, v: f64| {
            match rows[i].iter_mut().find(|e| e.0 == j) {
                Some(e) => e.1 += v,
                None => rows[i].push((j, v)),
            }
        };
        match self {
            NodalGeometry::Line { h, cells, .. } => {
                for e in 0..*cells {
                    let idx = [e, e + 1];
                    for p in 0..2 {
                        for q in 0..2 {
                            let s = if p == q { 1.0 } else { -1.0 };
                            add(&mut a, idx[p], idx[q], s / h);
                            add(&mut mm, idx[p], idx[q], if p == q { h / 3.0 } else { h / 6.0 });
                        }
                    }
                }
            }
            NodalGeometry::Mesh(m) => {
                for (ti, t) in m.triangles.iter().enumerate() {
                    let area = m.triangle_area(t);
                    let g = m.hat_gradients(ti);
                    for p in 0..3 {
                        for q in 0..3 {
                            add(&mut a, t[p], t[q], area * (g[p][0] * g[q][0] + g[p][1] * g[q][1]));
                            add(&mut mm, t[p], t[q], area / 12.0 * if p == q { 2.0 } else { 1.0 });
                        }
                    }
                }
            }
        }
        for rows in [&mut a, &mut mm] {
            for r in rows.iter_mut() {
                r.sort_by_key(|e| e.0);
            }
        }
        (a, mm)
    }
}

#[derive(Debug, Clone)]
pub(super) struct NodalBasis {
    pub geometry: NodalGeometry,
    pub eigenvalues: Vec<f64>,
    /// Mode values at every vertex (zero on the boundary).
    phi: Vec<Vec<f64>>,
    mass: Vec<Vec<(usize, f64)>>,
}

impl NodalBasis {
    pub fn line(a: f64, b: f64, cells: usize, k: Option<usize>) -> Result<Self> {
        if cells < 2 {
            return Err(FracError::InvalidParameter("interval mesh needs at least two cells".into()));
        }
        let k = k.unwrap_or(cells - 1);
        if k == 0 || k > cells - 1 {
            return Err(FracError::InvalidParameter(format!(
                "{k} modes requested but the mesh has {} interior vertices",
                cells - 1
            )));
        }
        let h = (b - a) / cells as f64;
        let geometry = NodalGeometry::Line { a, h, cells };
        let n = cells as f64;
        let mut eigenvalues = Vec::with_capacity(k);
        let mut phi = Vec::with_capacity(k);
        for j in 1..=k {
            let th = j as f64 * PI / n;
            let c = th.cos();
            eigenvalues.push(6.0 / (h * h) * (1.0 - c) / (2.0 + c));
            let scale = 1.0 / (h * n * (2.0 + c) / 6.0).sqrt();
            let v: Vec<f64> = (0..=cells)
                .map(|i| if i == 0 || i == cells { 0.0 } else { scale * (th * i as f64).sin() })
                .collect();
            phi.push(v);
        }
        let (_, mass) = geometry.assemble();
        Ok(NodalBasis { geometry, eigenvalues, phi, mass })
    }

    pub fn triangles(mesh: Arc<TriMesh>, k: usize) -> Result<Self> {
        let geometry = NodalGeometry::Mesh(mesh.clone());
        let dofs = mesh.interior_vertices();
        let n = dofs.len();
        if k == 0 || k > n {
            return Err(FracError::InvalidParameter(format!(
                "{k} modes requested but the mesh has {n} interior vertices"
            )));
        }
        let (a, mass) = geometry.assemble();
        let mut pos = vec![usize::MAX; mesh.num_vertices()];
        for (i, &v) in dofs.iter().enumerate() {
            pos[v] = i;
        }
        let dense = |rows: &Vec<Vec<(usize, f64)>>| {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for (i, &v) in dofs.iter().enumerate() {
                for &(c, val) in &rows[v] {
                    if pos[c] != usize::MAX {
                        m[(i, pos[c])] = val;
                    }
                }
            }
            m
        };
        let am = dense(&a);
        let mm = dense(&mass);
        let chol = mm
            .clone()
            .cholesky()
            .ok_or_else(|| FracError::Mesh("mass matrix is not positive definite".into()))?;
        let l = chol.l();
        // C = L^{-1} A L^{-T}
        let linv_a = l.solve_lower_triangular(&am).expect("triangular solve");
        let c = l.solve_lower_triangular(&linv_a.transpose()).expect("triangular solve");
        let c = 0.5 * (&c + c.transpose());
        let eig = c.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        order.truncate(k);
        let lt = l.transpose();
        let mut vecs: Vec<DVector<f64>> = order
            .iter()
            .map(|&i| {
                let y = eig.eigenvectors.column(i).into_owned();
                lt.solve_upper_triangular(&y).expect("triangular solve")
            })
            .collect();
        // The vectors are M-orthonormal in exact arithmetic; one modified
        // Gram–Schmidt pass in the M inner product cleans up rounding.
        let mut mv: Vec<DVector<f64>> = Vec::with_capacity(vecs.len());
        for i in 0..vecs.len() {
            let (done, rest) = vecs.split_at_mut(i);
            let v = &mut rest[0];
            for (u, mu) in done.iter().zip(&mv) {
                let proj = mu.dot(v);
                v.axpy(-proj, u, 1.0);
            }
            let m = &mm * &*v;
            let nrm = m.dot(v).sqrt();
            *v /= nrm;
            mv.push(m / nrm);
        }
        let eigenvalues = vecs.iter().map(|v| (v.transpose() * &am * v)[(0, 0)]).collect();
        let phi = vecs
            .iter()
            .map(|v| {
                let mut full = vec![0.0; mesh.num_vertices()];
                for (i, &d) in dofs.iter().enumerate() {
                    full[d] = v[i];
                }
                full
            })
            .collect();
        Ok(NodalBasis { geometry, eigenvalues, phi, mass })
    }

    pub fn mode(&self, k: usize, x: Point) -> f64 {
        self.geometry.interpolate(&self.phi[k], x)
    }

    /// Load vector `∫ (f - z_h) p_i` over all vertices.
    pub fn load(&self, f: &(dyn Fn(Point) -> f64 + Sync), lift: Option<&[f64]>) -> Vec<f64> {
        let mut load = vec![0.0; self.geometry.num_vertices()];
        self.geometry.for_each_qp(|x, w, hats| {
            let mut v = f(x);
            if let Some(z) = lift {
                v -= hats.iter().map(|&(i, l)| l * z[i]).sum::<f64>();
            }
            for &(i, l) in hats {
                load[i] += w * v * l;
            }
        });
        load
    }

    fn coefficients(&self, load: &[f64]) -> Vec<f64> {
        self.phi.iter().map(|p| p.iter().zip(load).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn project(&self, f: &(dyn Fn(Point) -> f64 + Sync), lift: Option<&[f64]>) -> Vec<f64> {
        self.coefficients(&self.load(f, lift))
    }

    pub fn project_gradient(&self, v: &DiffField) -> Vec<f64> {
        let mut load = vec![0.0; self.geometry.num_vertices()];
        match &self.geometry {
            NodalGeometry::Line { a, h, cells } => {
                // ∫_e v' p_i' = ±(v(x_{e+1}) - v(x_e))/h exactly.
                for e in 0..*cells {
                    let x0 = a + e as f64 * h;
                    let dv = (v.value.eval_1d(x0 + h) - v.value.eval_1d(x0)) / h;
                    load[e] -= dv;
                    load[e + 1] += dv;
                }
            }
            NodalGeometry::Mesh(m) => {
                let rule = triangle_rule_7();
                for (ti, t) in m.triangles.iter().enumerate() {
                    let area = m.triangle_area(t);
                    let g = m.hat_gradients(ti);
                    let p = [m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]];
                    let mut avg = [0.0; 2];
                    for (l, w) in rule.iter() {
                        let x = [
                            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
                        ];
                        let gv = v.grad(x);
                        avg[0] += w * area * gv[0];
                        avg[1] += w * area * gv[1];
                    }
                    for q in 0..3 {
                        load[t[q]] += avg[0] * g[q][0] + avg[1] * g[q][1];
                    }
                }
            }
        }
        self.coefficients(&load)
    }

    pub fn gram(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.phi[i], &self.phi[j]);
        self.mass
            .iter()
            .enumerate()
            .map(|(r, row)| a[r] * row.iter().map(|&(c, m)| m * b[c]).sum::<f64>())
            .sum()
    }

    pub fn vertex_values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.geometry.num_vertices()];
        for (c, p) in coeffs.iter().zip(&self.phi) {
            for (o, v) in out.iter_mut().zip(p) {
                *o += c * v;
            }
        }
        out
    }

    pub fn series(&self, coeffs: &[f64], x: Point) -> f64 {
        let Some(hats) = self.geometry.hats_at(x) else { return 0.0 };
        hats.iter()
            .map(|&(i, l)| l * coeffs.iter().zip(&self.phi).map(|(c, p)| c * p[i]).sum::<f64>())
            .sum()
    }
}
