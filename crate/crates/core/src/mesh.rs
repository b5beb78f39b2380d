//! Conforming triangle meshes with P1 element helpers.

use crate::domain::{segment_distance, Point, Segment};
use crate::error::{FracError, Result};
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// `true` for vertices on the boundary.
    pub boundary: Vec<bool>,
    boundary_edges: Vec<[usize; 2]>,
}

impl TriMesh {
    /// Validates orientation, conformity and boundary flags.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>) -> Result<Self> {
        if boundary.len() != vertices.len() {
            return Err(FracError::Mesh("boundary flags do not match vertex count".into()));
        }
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(FracError::Mesh(format!("triangle {t} references a missing vertex")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area <= 0.0 {
                return Err(FracError::Mesh(format!("triangle {t} is not positively oriented")));
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        let mut on_bd = vec![false; vertices.len()];
        for (&(a, b), &count) in &edges {
            match count {
                1 => {
                    boundary_edges.push([a, b]);
                    on_bd[a] = true;
                    on_bd[b] = true;
                }
                2 => {}
                _ => return Err(FracError::Mesh(format!("edge ({a}, {b}) shared by {count} triangles"))),
            }
        }
        boundary_edges.sort_unstable();
        if on_bd != boundary {
            return Err(FracError::Mesh("boundary flags inconsistent with edge adjacency".into()));
        }
        Ok(TriMesh { vertices, triangles, boundary, boundary_edges })
    }

    /// Builds the mesh and derives the boundary flags from edge adjacency.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut boundary = vec![false; vertices.len()];
        for (&(a, b), &c) in &edges {
            if c == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        Self::new(vertices, triangles, boundary)
    }

    /// Structured mesh of `[x0,x1] x [y0,y1]` with `nx x ny` cells split along a diagonal.
    pub fn rectangle(lo: Point, hi: Point, nx: usize, ny: usize) -> Result<Self> {
        Self::structured(lo, hi, nx, ny, |_, _| true)
    }

    /// Structured mesh of `[-1,1]^2 \ [0,1)^2` with `n` cells per unit length (`n` even spacing).
    pub fn lshape(n_per_unit: usize) -> Result<Self> {
        let n = 2 * n_per_unit;
        Self::structured([-1.0, -1.0], [1.0, 1.0], n, n, move |i, j| !(i >= n_per_unit && j >= n_per_unit))
    }

    fn structured(
        lo: Point,
        hi: Point,
        nx: usize,
        ny: usize,
        keep_cell: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(FracError::Mesh("mesh needs at least one cell per direction".into()));
        }
        let mut index = vec![usize::MAX; (nx + 1) * (ny + 1)];
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vid = |i: usize, j: usize, vertices: &mut Vec<Point>| {
            let k = id(i, j);
            if index[k] == usize::MAX {
                index[k] = vertices.len();
                vertices.push([
                    lo[0] + (hi[0] - lo[0]) * i as f64 / nx as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / ny as f64,
                ]);
            }
            index[k]
        };
        for j in 0..ny {
            for i in 0..nx {
                if !keep_cell(i, j) {
                    continue;
                }
                let a = vid(i, j, &mut vertices);
                let b = vid(i + 1, j, &mut vertices);
                let c = vid(i + 1, j + 1, &mut vertices);
                let d = vid(i, j + 1, &mut vertices);
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Self::from_triangles(vertices, triangles)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.boundary[v]).collect()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(t)).sum()
    }

    pub fn triangle_area(&self, t: &[usize; 3]) -> f64 {
        signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]])
    }

    /// Longest edge length.
    pub fn max_edge(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (self.vertices[t[k]], self.vertices[t[(k + 1) % 3]]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub(crate) fn boundary_segments(&self) -> Vec<Segment> {
        self.boundary_edges
            .iter()
            .map(|e| (self.vertices[e[0]], self.vertices[e[1]]))
            .collect()
    }

    pub fn boundary_distance(&self, x: Point) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| segment_distance(x, self.vertices[e[0]], self.vertices[e[1]]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Containing triangle and barycentric coordinates of `x`, if any.
    pub fn locate(&self, x: Point) -> Option<(usize, [f64; 3])> {
        let tol = 1e-12;
        for (t, tri) in self.triangles.iter().enumerate() {
            let l = barycentric(self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]], x);
            if l.iter().all(|&v| v >= -tol) {
                return Some((t, l));
            }
        }
        None
    }

    /// Gradients of the three hat functions on triangle `t`.
    pub fn hat_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        let p = [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]];
        let two_a = 2.0 * signed_area(p[0], p[1], p[2]);
        let mut g = [[0.0; 2]; 3];
        for k in 0..3 {
            let a = p[(k + 1) % 3];
            let b = p[(k + 2) % 3];
            g[k] = [(a[1] - b[1]) / two_a, (b[0] - a[0]) / two_a];
        }
        g
    }

    /// Evaluates the P1 interpolant with nodal values `vals` at `x` (zero outside).
    pub fn interpolate(&self, vals: &[f64], x: Point) -> f64 {
        match self.locate(x) {
            Some((t, l)) => {
                let tri = self.triangles[t];
                l[0] * vals[tri[0]] + l[1] * vals[tri[1]] + l[2] * vals[tri[2]]
            }
            None => 0.0,
        }
    }
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn barycentric(a: Point, b: Point, c: Point, x: Point) -> [f64; 3] {
    let area = signed_area(a, b, c);
    let l1 = signed_area(x, b, c) / area;
    let l2 = signed_area(a, x, c) / area;
    [l1, l2, 1.0 - l1 - l2]
}
