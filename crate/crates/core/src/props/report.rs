use serde::Serialize;

/// Outcome of one property check.
///
/// Inequality checks report `lhs <= rhs`; equality checks report the absolute
/// discrepancy as `lhs` and the allowed discrepancy as `rhs` with zero tolerance.
/// In both cases `slack = rhs - lhs` and `pass` iff `slack >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub d: usize,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Whether a failure is a genuine violation; informative checks (where the
    /// inequality may legitimately fail) set this to false.
    pub asserted: bool,
    pub metadata: String,
}

impl CheckReport {
    pub fn new(name: &str, d: usize, p: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.to_string(),
            d,
            p,
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            asserted: true,
            metadata: String::new(),
        }
    }

    /// Equality check: `|a - b| <= allowed`.
    pub fn equality(name: &str, d: usize, p: f64, a: f64, b: f64, allowed: f64) -> Self {
        Self::new(name, d, p, (a - b).abs(), allowed, 0.0)
    }

    pub fn with_metadata(mut self, metadata: impl Into<String>) -> Self {
        self.metadata = metadata.into();
        self
    }

    pub fn informative(mut self) -> Self {
        self.asserted = false;
        self
    }

    /// True unless this is an asserted check that failed.
    pub fn ok(&self) -> bool {
        self.pass || !self.asserted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_slack_within_tolerance() {
        assert!(CheckReport::new("a", 1, 2.0, 1.0, 1.0, 0.0).pass);
        assert!(CheckReport::new("a", 1, 2.0, 1.1, 1.0, 0.2).pass);
        assert!(!CheckReport::new("a", 1, 2.0, 1.3, 1.0, 0.2).pass);
        let e = CheckReport::equality("e", 1, 2.0, 1.0, 1.0 + 1e-7, 1e-6);
        assert!(e.pass && (e.slack - (1e-6 - 1e-7)).abs() < 1e-15);
        let i = CheckReport::new("i", 2, 1.01, 2.0, 1.0, 0.0).informative();
        assert!(!i.pass && i.ok());
    }
}
