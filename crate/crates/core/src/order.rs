use crate::error::{FracError, Result};

/// Fractional order `alpha` of the operator `(-Δ)^{alpha/2}`, strictly inside `(0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(FracError::InvalidParameter(format!(
                "fractional order must lie in (0, 2), got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The directional representation has no closed form at `alpha = 1`.
    pub fn require_directional(self) -> Result<Self> {
        if (self.0 - 1.0).abs() < 1e-12 {
            Err(FracError::Domain(
                "directional representation is undefined at alpha = 1".into(),
            ))
        } else {
            Ok(self)
        }
    }

    /// Half order `alpha/2`.
    #[inline]
    pub fn half(self) -> f64 {
        0.5 * self.0
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = FracError;
    fn try_from(alpha: f64) -> Result<Self> {
        FracOrder::new(alpha)
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        for bad in [0.0, 2.0, -0.3, 2.5, f64::NAN] {
            assert!(FracOrder::new(bad).is_err(), "{bad}");
        }
        assert!(FracOrder::new(1.999).is_ok());
    }

    #[test]
    fn directional_flags_unit_order() {
        assert!(FracOrder::new(1.0).unwrap().require_directional().is_err());
        assert!(FracOrder::new(1.5).unwrap().require_directional().is_ok());
    }
}
