use crate::error::{Error, Result};

/// Exponent `p` of the ground cost `|x - y|^p`.
///
/// `p = 1` is accepted for distances; projections require `p > 1` (see
/// [`CostExponent::for_projection`]).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CostExponent(f64);

impl CostExponent {
    pub const ONE: CostExponent = CostExponent(1.0);
    pub const TWO: CostExponent = CostExponent(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidSpec(format!("cost exponent must be >= 1, got {p}")))
        }
    }

    /// Like [`CostExponent::new`] but rejects `p = 1`, whose projection is not unique.
    pub fn for_projection(p: f64) -> Result<Self> {
        let c = Self::new(p)?;
        if p > 1.0 {
            Ok(c)
        } else {
            Err(Error::InvalidSpec("projection needs p > 1".into()))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `d^p` for a distance `d >= 0`.
    #[inline]
    pub fn pow(self, d: f64) -> f64 {
        if self.0 == 1.0 {
            d
        } else if self.0 == 2.0 {
            d * d
        } else {
            d.powf(self.0)
        }
    }

    /// `|x - y|^p`.
    #[inline]
    pub fn cost(self, x: &[f64], y: &[f64]) -> f64 {
        let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if self.0 == 2.0 {
            sq
        } else {
            self.pow(sq.sqrt())
        }
    }

    /// Inverse of the power map: `c^{1/p}`.
    #[inline]
    pub fn root(self, c: f64) -> f64 {
        let c = c.max(0.0);
        if self.0 == 1.0 {
            c
        } else if self.0 == 2.0 {
            c.sqrt()
        } else {
            c.powf(1.0 / self.0)
        }
    }
}

impl std::fmt::Display for CostExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates() {
        assert!(CostExponent::new(0.5).is_err());
        assert!(CostExponent::new(f64::NAN).is_err());
        assert!(CostExponent::new(1.0).is_ok());
        assert!(CostExponent::for_projection(1.0).is_err());
        assert!(CostExponent::for_projection(1.5).is_ok());
    }

    #[test]
    fn cost_values() {
        let p3 = CostExponent::new(3.0).unwrap();
        assert_eq!(p3.cost(&[0.0], &[1.0]), 1.0);
        assert!((CostExponent::TWO.cost(&[0.0, 0.0], &[3.0, 4.0]) - 25.0).abs() < 1e-15);
        assert!((CostExponent::ONE.cost(&[0.0, 0.0], &[3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert!((p3.root(p3.pow(1.7)) - 1.7).abs() < 1e-14);
    }
}
