use crate::domain::Point;
use std::fmt;
use std::sync::Arc;

/// Where a field is meaningful: inside the domain only, or on all of space
/// (exterior data for the integral operators must be whole-space).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Interior,
    WholeSpace,
}

/// A deterministic real-valued field `x -> f(x)`.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    pub support: Support,
    zero: bool,
}

impl ScalarField {
    pub fn new(support: Support, f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { eval: Arc::new(f), support, zero: false }
    }

    pub fn whole_space(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Support::WholeSpace, f)
    }

    pub fn interior(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Support::Interior, f)
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::whole_space(move |_| c);
        f.zero = c == 0.0;
        f
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// One-dimensional convenience: only `x[0]` is read.
    pub fn from_1d(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::whole_space(move |p| f(p[0]))
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        (self.eval)(x)
    }

    #[inline]
    pub fn eval_1d(&self, x: f64) -> f64 {
        (self.eval)([x, 0.0])
    }

    /// True for fields built as the constant zero.
    pub fn is_known_zero(&self) -> bool {
        self.zero
    }

    /// True when `f(x) == 0` at every probe, used to skip source sampling.
    pub fn vanishes_at(&self, probes: &[Point]) -> bool {
        probes.iter().all(|&p| self.eval(p) == 0.0)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("support", &self.support).finish()
    }
}

/// A field with an optional analytic gradient, used by the nonharmonic lifting.
#[derive(Clone)]
pub struct DiffField {
    pub value: ScalarField,
    pub gradient: Option<Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>>,
}

impl DiffField {
    pub fn new(
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        DiffField { value: ScalarField::whole_space(value), gradient: Some(Arc::new(gradient)) }
    }

    /// Gradient by the analytic callback, or central differences otherwise.
    pub fn grad(&self, x: Point) -> [f64; 2] {
        match &self.gradient {
            Some(g) => g(x),
            None => {
                let h = 1e-6;
                let f = &self.value;
                [
                    (f.eval([x[0] + h, x[1]]) - f.eval([x[0] - h, x[1]])) / (2.0 * h),
                    (f.eval([x[0], x[1] + h]) - f.eval([x[0], x[1] - h])) / (2.0 * h),
                ]
            }
        }
    }
}

impl fmt::Debug for DiffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffField").field("analytic_gradient", &self.gradient.is_some()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_is_repeatable() {
        let f = ScalarField::whole_space(|p| (-(p[0] * p[0] + p[1] * p[1])).exp());
        let x = [0.3, -0.7];
        assert_eq!(f.eval(x), f.eval(x));
        assert!(ScalarField::zero().vanishes_at(&[[0.0, 0.0], [1.0, 2.0]]));
    }

    #[test]
    fn numeric_gradient_fallback() {
        let v = DiffField { value: ScalarField::from_1d(|x| x * x * x), gradient: None };
        assert!((v.grad([0.5, 0.0])[0] - 0.75).abs() < 1e-8);
    }
}
