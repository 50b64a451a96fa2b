use crate::error::{Error, Result};

/// Absolute/relative tolerance pair used for every structural check.
///
/// A quantity `x` measured against a reference scale `s` passes when
/// `x <= abs_tol + rel_tol * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) || !abs_tol.is_finite() || !rel_tol.is_finite() {
            return Err(Error::Tolerance(format!(
                "tolerances must be finite and non-negative (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        if abs_tol == 0.0 && rel_tol == 0.0 {
            return Err(Error::Tolerance("abs_tol and rel_tol are both zero".into()));
        }
        Ok(Self { abs_tol, rel_tol })
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale.abs()
    }

    pub fn accepts(&self, value: f64, scale: f64) -> bool {
        value <= self.threshold(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_double_zero() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(f64::NAN, 1.0).is_err());
        assert!(Tolerance::new(0.0, 1e-8).is_ok());
    }

    #[test]
    fn threshold_combines_both_parts() {
        let tol = Tolerance::default();
        assert_eq!(tol.threshold(0.0), 1e-10);
        assert!((tol.threshold(100.0) - (1e-10 + 1e-6)).abs() < 1e-20);
    }
}
