//! Collocation point sets and the multiquadric basis.

use crate::domain::{dist, Domain, Point};
use crate::error::{FracError, Result};
use std::f64::consts::TAU;

/// How a collocation set was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Unit disk, `I` rings of `I` points plus the centre.
    PolarGrid { i: usize },
    /// `n × n` grid on `[-a, a]^2` with the outer ring on the boundary.
    SquareGrid { n: usize, half: f64 },
    /// Square grid restricted to the L-shape.
    LShapeGrid { n: usize },
    /// Uniform grid on an interval including both end points.
    IntervalGrid { n: usize },
    Explicit,
}

/// Interior points followed by boundary points.
#[derive(Debug, Clone)]
pub struct CollocationSet {
    pub interior: Vec<Point>,
    pub boundary: Vec<Point>,
    pub generator: Generator,
}

impl CollocationSet {
    /// Checks that interior points are strictly inside `dom`, boundary
    /// points lie on `∂dom` and no two points coincide.
    pub fn new(interior: Vec<Point>, boundary: Vec<Point>, generator: Generator, dom: &Domain) -> Result<Self> {
        if let Some(p) = interior.iter().find(|&&p| !dom.contains_strict(p)) {
            return Err(FracError::Domain(format!("collocation point ({}, {}) is not interior", p[0], p[1])));
        }
        if let Some(p) = boundary.iter().find(|&&p| !dom.on_boundary(p)) {
            return Err(FracError::Domain(format!("collocation point ({}, {}) is not on the boundary", p[0], p[1])));
        }
        let set = CollocationSet { interior, boundary, generator };
        let pts = set.points();
        for i in 0..pts.len() {
            for j in 0..i {
                if dist(pts[i], pts[j]) <= 1e-10 {
                    return Err(FracError::InvalidParameter(format!("collocation points {j} and {i} coincide")));
                }
            }
        }
        Ok(set)
    }

    /// Number of interior points `M`.
    pub fn m(&self) -> usize {
        self.interior.len()
    }

    /// Number of boundary points `N`.
    pub fn n(&self) -> usize {
        self.boundary.len()
    }

    pub fn len(&self) -> usize {
        self.m() + self.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Point> {
        self.interior.iter().chain(&self.boundary).copied().collect()
    }

    /// The set rotated by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = |p: &Point| [c * p[0] - s * p[1], s * p[0] + c * p[1]];
        CollocationSet {
            interior: self.interior.iter().map(rot).collect(),
            boundary: self.boundary.iter().map(rot).collect(),
            generator: Generator::Explicit,
        }
    }
}

/// Polar grid on the unit disk: `x = (i₁/I) (cos(2π i₂/I), sin(2π i₂/I))`
/// for `i₁, i₂ = 1..I`, plus the centre. Rings `1..I-1` and the centre are
/// interior (`M = (I-1) I + 1`); ring `I` is the boundary (`N = I`).
pub fn generate_disk_points(i: usize) -> Result<CollocationSet> {
    if i < 3 {
        return Err(FracError::InvalidParameter(format!("polar grid needs I >= 3, got {i}")));
    }
    let ring = |i1: usize| -> Vec<Point> {
        let r = i1 as f64 / i as f64;
        (1..=i)
            .map(|i2| {
                let t = TAU * i2 as f64 / i as f64;
                [r * t.cos(), r * t.sin()]
            })
            .collect()
    };
    let mut interior = vec![[0.0, 0.0]];
    for i1 in 1..i {
        interior.extend(ring(i1));
    }
    let boundary = ring(i);
    CollocationSet::new(interior, boundary, Generator::PolarGrid { i }, &Domain::disk(1.0)?)
}

/// `n × n` regular grid on `[-half, half]^2`; the outer ring of `4(n-1)`
/// points is the boundary.
pub fn generate_square_points(n: usize, half: f64) -> Result<CollocationSet> {
    if n < 3 {
        return Err(FracError::InvalidParameter(format!("square grid needs n >= 3, got {n}")));
    }
    let x = |k: usize| -half + 2.0 * half * k as f64 / (n - 1) as f64;
    let (mut interior, mut boundary) = (Vec::new(), Vec::new());
    for a in 0..n {
        for b in 0..n {
            let p = [x(b), x(a)];
            if a == 0 || b == 0 || a == n - 1 || b == n - 1 {
                boundary.push(p);
            } else {
                interior.push(p);
            }
        }
    }
    CollocationSet::new(interior, boundary, Generator::SquareGrid { n, half }, &Domain::rectangle(half, half)?)
}

/// The `n × n` grid of `[-1, 1]^2` restricted to the L-shape. `n` must be
/// odd so that the re-entrant edges lie on grid lines.
pub fn generate_lshape_points(n: usize) -> Result<CollocationSet> {
    if n < 5 || n % 2 == 0 {
        return Err(FracError::InvalidParameter(format!("L-shape grid needs odd n >= 5, got {n}")));
    }
    let dom = Domain::lshape();
    let x = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    let (mut interior, mut boundary) = (Vec::new(), Vec::new());
    for a in 0..n {
        for b in 0..n {
            let p = [x(b), x(a)];
            if dom.on_boundary(p) {
                boundary.push(p);
            } else if dom.contains_strict(p) {
                interior.push(p);
            }
        }
    }
    CollocationSet::new(interior, boundary, Generator::LShapeGrid { n }, &dom)
}

/// `n` uniformly spaced points on `[-half, half]`, end points on the boundary.
pub fn generate_interval_points(n: usize, half: f64) -> Result<CollocationSet> {
    if n < 3 {
        return Err(FracError::InvalidParameter(format!("interval grid needs n >= 3, got {n}")));
    }
    let x = |k: usize| [-half + 2.0 * half * k as f64 / (n - 1) as f64, 0.0];
    let interior = (1..n - 1).map(x).collect();
    CollocationSet::new(interior, vec![x(0), x(n - 1)], Generator::IntervalGrid { n }, &Domain::interval(half)?)
}

/// `φ(r) = √(r² + c²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiquadricRBF {
    pub c: f64,
}

impl MultiquadricRBF {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(MultiquadricRBF { c })
        } else {
            Err(FracError::InvalidParameter(format!("shape parameter must be positive, got {c}")))
        }
    }

    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        (r * r + self.c * self.c).sqrt()
    }

    #[inline]
    pub fn phi_between(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
        (dx * dx + dy * dy + self.c * self.c).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::norm;

    #[test]
    fn disk_counts() {
        let s = generate_disk_points(39).unwrap();
        assert_eq!((s.m(), s.n(), s.len()), (1483, 39, 1522));
        let s = generate_disk_points(3).unwrap();
        assert_eq!((s.m(), s.n()), (7, 3));
        assert!(generate_disk_points(2).is_err());
    }

    #[test]
    fn ring_radii() {
        let i = 19;
        let s = generate_disk_points(i).unwrap();
        for (k, p) in s.interior.iter().enumerate().skip(1) {
            let i1 = (k - 1) / i + 1;
            assert!((norm(*p) - i1 as f64 / i as f64).abs() < 1e-15);
        }
        assert!(s.boundary.iter().all(|&p| (norm(p) - 1.0).abs() < 1e-15));
    }

    #[test]
    fn square_preset_counts() {
        let s = generate_square_points(41, 1.0).unwrap();
        assert_eq!((s.m(), s.n()), (1521, 160));
    }

    #[test]
    fn lshape_grid() {
        let s = generate_lshape_points(5).unwrap();
        // 25 grid points minus the 4 in (0,1]^2 \ axes; 8 of the rest are off-boundary
        assert_eq!(s.len(), 21);
        assert_eq!(s.m(), 5);
        assert!(s.boundary.contains(&[0.0, 0.0]) && s.boundary.contains(&[0.5, 0.0]));
        assert!(generate_lshape_points(6).is_err());
    }

    #[test]
    fn duplicates_and_misplaced_points_are_rejected() {
        let dom = Domain::disk(1.0).unwrap();
        let b = vec![[1.0, 0.0]];
        assert!(CollocationSet::new(vec![[0.1, 0.0], [0.1, 0.0]], b.clone(), Generator::Explicit, &dom).is_err());
        assert!(CollocationSet::new(vec![[1.0, 0.0]], vec![[0.0, 1.0]], Generator::Explicit, &dom).is_err());
        assert!(CollocationSet::new(vec![[0.0, 0.0]], vec![[0.5, 0.0]], Generator::Explicit, &dom).is_err());
        assert!(CollocationSet::new(vec![[0.0, 0.0]], b, Generator::Explicit, &dom).is_ok());
    }

    #[test]
    fn multiquadric() {
        assert!(MultiquadricRBF::new(0.0).is_err());
        let p = MultiquadricRBF::new(0.75).unwrap();
        assert_eq!(p.phi(1.0), 1.25);
        assert_eq!(p.phi_between([1.0, 2.0], [1.0, 3.0]), 1.25);
    }
}
