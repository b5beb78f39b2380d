//! Bounded domains in one and two dimensions.
//!
//! One-dimensional points are stored as `[x, 0.0]` so every solver can share
//! the same point type.

use crate::error::{FracError, Result};
use crate::mesh::TriMesh;
use std::sync::Arc;

pub type Point = [f64; 2];

/// Tolerance used for boundary membership decisions.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[inline]
pub fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Vertices of `[-1,1]^2 \ [0,1)^2`, counter-clockwise.
pub const LSHAPE_VERTICES: [Point; 6] =
    [[-1.0, -1.0], [1.0, -1.0], [1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [-1.0, 1.0]];

#[derive(Debug, Clone)]
pub enum Domain {
    Interval { center: f64, half: f64 },
    Rectangle { center: Point, half: [f64; 2] },
    Disk { center: Point, radius: f64 },
    LShape,
    TriMesh(Arc<TriMesh>),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(FracError::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl Domain {
    /// `(-half, half)`.
    pub fn interval(half: f64) -> Result<Self> {
        positive("interval half-width", half)?;
        Ok(Domain::Interval { center: 0.0, half })
    }

    /// `(a, b)`.
    pub fn interval_between(a: f64, b: f64) -> Result<Self> {
        positive("interval length", b - a)?;
        Ok(Domain::Interval { center: 0.5 * (a + b), half: 0.5 * (b - a) })
    }

    /// `(-ax, ax) x (-ay, ay)`.
    pub fn rectangle(ax: f64, ay: f64) -> Result<Self> {
        Self::rectangle_centered([0.0, 0.0], ax, ay)
    }

    pub fn rectangle_centered(center: Point, ax: f64, ay: f64) -> Result<Self> {
        positive("rectangle half-width", ax)?;
        positive("rectangle half-height", ay)?;
        Ok(Domain::Rectangle { center, half: [ax, ay] })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        positive("disk radius", radius)?;
        Ok(Domain::Disk { center: [0.0, 0.0], radius })
    }

    pub fn lshape() -> Self {
        Domain::LShape
    }

    pub fn mesh(mesh: TriMesh) -> Self {
        Domain::TriMesh(Arc::new(mesh))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Rectangle { .. } => "rectangle",
            Domain::Disk { .. } => "disk",
            Domain::LShape => "lshape",
            Domain::TriMesh(_) => "trimesh",
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Interval { center, half } => ([center - half, 0.0], [center + half, 0.0]),
            Domain::Rectangle { center, half } => (
                [center[0] - half[0], center[1] - half[1]],
                [center[0] + half[0], center[1] + half[1]],
            ),
            Domain::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Domain::LShape => ([-1.0, -1.0], [1.0, 1.0]),
            Domain::TriMesh(m) => m.bounding_box(),
        }
    }

    /// Lebesgue measure (length or area).
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { half, .. } => 2.0 * half,
            Domain::Rectangle { half, .. } => 4.0 * half[0] * half[1],
            Domain::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Domain::LShape => 3.0,
            Domain::TriMesh(m) => m.area(),
        }
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    pub fn signed_distance(&self, x: Point) -> f64 {
        match self {
            Domain::Interval { center, half } => half - (x[0] - center).abs(),
            Domain::Rectangle { center, half } => {
                let dx = (x[0] - center[0]).abs() - half[0];
                let dy = (x[1] - center[1]).abs() - half[1];
                if dx <= 0.0 && dy <= 0.0 {
                    -dx.max(dy)
                } else {
                    -(dx.max(0.0)).hypot(dy.max(0.0))
                }
            }
            Domain::Disk { center, radius } => radius - dist(x, *center),
            Domain::LShape => {
                let d = polygon_edge_distance(&LSHAPE_VERTICES, x);
                if point_in_polygon(&LSHAPE_VERTICES, x) {
                    d
                } else {
                    -d
                }
            }
            Domain::TriMesh(m) => {
                let d = m.boundary_distance(x);
                if m.locate(x).is_some() {
                    d
                } else {
                    -d
                }
            }
        }
    }

    /// Closed membership with the boundary tolerance.
    pub fn contains(&self, x: Point) -> bool {
        self.signed_distance(x) >= -BOUNDARY_TOL
    }

    /// Open membership: at least the boundary tolerance away from the boundary.
    pub fn contains_strict(&self, x: Point) -> bool {
        self.signed_distance(x) > BOUNDARY_TOL
    }

    /// True when `x` lies on the boundary within the tolerance.
    pub fn on_boundary(&self, x: Point) -> bool {
        self.signed_distance(x).abs() <= BOUNDARY_TOL
    }

    /// Radius of the largest ball centred at interior point `x` inside the domain.
    pub fn inscribed_radius(&self, x: Point) -> Result<f64> {
        let d = self.signed_distance(x);
        if d > BOUNDARY_TOL {
            Ok(d)
        } else {
            Err(FracError::Domain(format!(
                "point ({}, {}) is not in the open {}",
                x[0],
                x[1],
                self.name()
            )))
        }
    }

    /// Length of the segment from `x` along `-theta` that stays in the closed domain.
    ///
    /// `theta` must be a unit vector (in 1D only its sign matters). Grazing
    /// contacts with a polygon vertex count as an exit.
    pub fn backward_distance(&self, x: Point, theta: Point) -> Result<f64> {
        if !self.contains(x) {
            return Err(FracError::Domain(format!(
                "backward distance from ({}, {}) outside the {}",
                x[0],
                x[1],
                self.name()
            )));
        }
        let d = [-theta[0], -theta[1]];
        let t = match self {
            Domain::Interval { center, half } => {
                if d[0] > 0.0 {
                    center + half - x[0]
                } else if d[0] < 0.0 {
                    x[0] - (center - half)
                } else {
                    return Err(FracError::InvalidParameter("zero direction".into()));
                }
            }
            Domain::Rectangle { center, half } => {
                let mut t = f64::INFINITY;
                for k in 0..2 {
                    if d[k] > 0.0 {
                        t = t.min((center[k] + half[k] - x[k]) / d[k]);
                    } else if d[k] < 0.0 {
                        t = t.min((center[k] - half[k] - x[k]) / d[k]);
                    }
                }
                t
            }
            Domain::Disk { center, radius } => {
                let p = sub(x, *center);
                let b = dot(p, d);
                let c = dot(p, p) - radius * radius;
                let disc = (b * b - c).max(0.0);
                -b + disc.sqrt()
            }
            Domain::LShape => ray_exit(self, &lshape_edges(), x, d),
            Domain::TriMesh(m) => ray_exit(self, &m.boundary_segments(), x, d),
        };
        Ok(t.max(0.0))
    }

    /// Points evenly spaced on the boundary (used for boundary-data checks).
    pub fn boundary_samples(&self, n: usize) -> Vec<Point> {
        match self {
            Domain::Interval { center, half } => vec![[center - half, 0.0], [center + half, 0.0]],
            Domain::Disk { center, radius } => (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
            Domain::Rectangle { center, half } => {
                let (lo, hi) = ([center[0] - half[0], center[1] - half[1]], [center[0] + half[0], center[1] + half[1]]);
                let poly = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
                sample_polygon(&poly, n)
            }
            Domain::LShape => sample_polygon(&LSHAPE_VERTICES, n),
            Domain::TriMesh(m) => m
                .boundary_segments()
                .iter()
                .map(|s| [0.5 * (s.0[0] + s.1[0]), 0.5 * (s.0[1] + s.1[1])])
                .take(n.max(1))
                .collect(),
        }
    }
}

fn sample_polygon(poly: &[Point], n: usize) -> Vec<Point> {
    let m = poly.len();
    let perim: f64 = (0..m).map(|i| dist(poly[i], poly[(i + 1) % m])).sum();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = perim * k as f64 / n as f64;
        for i in 0..m {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            let l = dist(a, b);
            if s <= l || i == m - 1 {
                let t = (s / l).min(1.0);
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                break;
            }
            s -= l;
        }
    }
    out
}

pub(crate) type Segment = (Point, Point);

fn lshape_edges() -> Vec<Segment> {
    let v = &LSHAPE_VERTICES;
    (0..v.len()).map(|i| (v[i], v[(i + 1) % v.len()])).collect()
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let l2 = dot(ab, ab);
    let t = if l2 > 0.0 { (dot(ap, ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn polygon_edge_distance(poly: &[Point], x: Point) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(x, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn point_in_polygon(poly: &[Point], x: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi[1] > x[1]) != (pj[1] > x[1]) {
            let xc = pj[0] + (x[1] - pj[1]) * (pi[0] - pj[0]) / (pi[1] - pj[1]);
            if x[0] < xc {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// First exit of the ray `x + t d` from a polygonal region bounded by `edges`.
fn ray_exit(dom: &Domain, edges: &[Segment], x: Point, d: Point) -> f64 {
    let scale = {
        let (lo, hi) = dom.bounding_box();
        dist(lo, hi)
    };
    let eps = 1e-13 * scale.max(1.0);
    let mut cand: Vec<(f64, bool)> = vec![(0.0, false)];
    for &(a, b) in edges {
        let e = sub(b, a);
        let den = cross(d, e);
        let ax = sub(a, x);
        if den.abs() <= 1e-15 * norm(e) {
            // Parallel: only collinear edges matter, they contribute their endpoints.
            if cross(ax, d).abs() <= eps {
                for p in [a, b] {
                    let t = dot(sub(p, x), d);
                    if t > eps {
                        cand.push((t, true));
                    }
                }
            }
            continue;
        }
        let t = cross(ax, e) / den;
        let s = cross(ax, d) / den;
        if t > eps && (-1e-12..=1.0 + 1e-12).contains(&s) {
            let at_vertex = s.abs() <= 1e-12 || (s - 1.0).abs() <= 1e-12;
            cand.push((t, at_vertex));
        }
    }
    cand.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, bool)> = Vec::with_capacity(cand.len());
    for c in cand {
        match merged.last_mut() {
            Some(last) if c.0 - last.0 <= eps => last.1 |= c.1,
            _ => merged.push(c),
        }
    }
    for i in 0..merged.len() {
        let (t, vertex) = merged[i];
        if i > 0 && vertex {
            return t;
        }
        let next = merged.get(i + 1).map_or(t + scale, |c| c.0);
        let mid = 0.5 * (t + next);
        if !dom.contains_strict([x[0] + mid * d[0], x[1] + mid * d[1]]) {
            return t;
        }
    }
    merged.last().map_or(0.0, |c| c.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn backward_distance_examples() {
        let disk = Domain::disk(1.0).unwrap();
        for k in 0..8 {
            let t = k as f64 * 0.7;
            let bd = disk.backward_distance([0.0, 0.0], [t.cos(), t.sin()]).unwrap();
            assert!((bd - 1.0).abs() < 1e-15);
        }
        let iv = Domain::interval(1.0).unwrap();
        assert!((iv.backward_distance([0.5, 0.0], [1.0, 0.0]).unwrap() - 1.5).abs() < 1e-15);
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        assert!((sq.backward_distance([0.5, 0.0], [1.0, 0.0]).unwrap() - 1.5).abs() < 1e-15);
        assert!(disk.backward_distance([2.0, 0.0], [1.0, 0.0]).is_err());
    }

    #[test]
    fn inscribed_radius_examples() {
        let disk = Domain::disk(1.0).unwrap();
        assert!((disk.inscribed_radius([0.5, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        assert_eq!(sq.inscribed_radius([0.0, 0.0]).unwrap(), 1.0);
        let l = Domain::lshape();
        assert!((l.inscribed_radius([-0.5, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!(l.inscribed_radius([0.5, 0.5]).is_err());
        assert!(disk.inscribed_radius([1.0, 0.0]).is_err());
    }

    #[test]
    fn lshape_membership_and_rays() {
        let l = Domain::lshape();
        assert!(l.contains_strict([-0.5, -0.5]));
        assert!(l.contains_strict([0.5, -0.5]));
        assert!(!l.contains([0.5, 0.5]));
        assert!(l.on_boundary([0.0, 0.5]));
        // Ray from (-0.5, 0.5) heading right meets the reentrant edge x = 0.
        assert!((l.backward_distance([-0.5, 0.5], [-1.0, 0.0]).unwrap() - 0.5).abs() < 1e-14);
        // Ray along y = 0 reaches the corner and would run along the edge: stop there.
        assert!((l.backward_distance([-0.5, 0.0], [-1.0, 0.0]).unwrap() - 0.5).abs() < 1e-14);
        // Grazing the reentrant corner diagonally counts as an exit.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bd = l.backward_distance([0.5, -0.5], [s, -s]).unwrap();
        assert!((bd - 0.5f64.hypot(0.5)).abs() < 1e-13);
        // A ray staying below the notch crosses the whole square.
        assert!((l.backward_distance([-0.5, -0.5], [-1.0, 0.0]).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn signed_distance_outside_rectangle() {
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        assert!((sq.signed_distance([2.0, 2.0]) + 2f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn disk_backward_point_lands_on_circle(
            r in 0.1f64..0.99, phi in 0.0f64..6.3, t in 0.0f64..6.3, rad in 0.3f64..3.0
        ) {
            let disk = Domain::disk(rad).unwrap();
            let x = [r * rad * phi.cos(), r * rad * phi.sin()];
            let th = [t.cos(), t.sin()];
            let bd = disk.backward_distance(x, th).unwrap();
            let p = [x[0] - bd * th[0], x[1] - bd * th[1]];
            prop_assert!((norm(p) - rad).abs() < 1e-12);
        }

        #[test]
        fn lshape_backward_segment_stays_inside(
            px in -0.99f64..0.99, py in -0.99f64..0.99, t in 0.0f64..6.3
        ) {
            let l = Domain::lshape();
            prop_assume!(l.contains_strict([px, py]));
            let th = [t.cos(), t.sin()];
            let bd = l.backward_distance([px, py], th).unwrap();
            prop_assert!(bd > 0.0);
            for k in 1..50 {
                let s = bd * k as f64 / 50.0;
                prop_assert!(l.contains([px - s * th[0], py - s * th[1]]));
            }
            let s = bd + 1e-6;
            prop_assert!(!l.contains_strict([px - s * th[0], py - s * th[1]]));
        }
    }
}
