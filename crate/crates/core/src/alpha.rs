use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymmetry level of the expectile, restricted to the open interval (0, 1).
///
/// `AlphaLevel(1/2)` recovers the mean; levels above 1/2 weight the upper
/// tail and yield a coherent risk measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaLevel(f64);

impl AlphaLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Asymmetric linear score: `alpha * x` for `x >= 0`, `(1 - alpha) * x` otherwise.
    #[inline]
    pub fn u_score(self, x: f64) -> f64 {
        if x >= 0.0 {
            self.0 * x
        } else {
            (1.0 - self.0) * x
        }
    }

    /// Asymmetric quadratic loss: `alpha * x^2` for `x >= 0`, `(1 - alpha) * x^2` otherwise.
    #[inline]
    pub fn v_loss(self, x: f64) -> f64 {
        if x >= 0.0 {
            self.0 * x * x
        } else {
            (1.0 - self.0) * x * x
        }
    }
}

impl std::fmt::Display for AlphaLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_endpoints_and_garbage() {
        assert!(AlphaLevel::new(0.0).is_err());
        assert!(AlphaLevel::new(1.0).is_err());
        assert!(AlphaLevel::new(-0.2).is_err());
        assert!(AlphaLevel::new(f64::NAN).is_err());
        assert!(AlphaLevel::new(0.5).is_ok());
    }

    #[test]
    fn u_score_matches_definition() {
        let a = AlphaLevel::new(0.25).unwrap();
        assert_eq!(a.u_score(2.0), 0.5);
        assert_eq!(a.u_score(-2.0), -1.5);
        assert_eq!(a.u_score(0.0), 0.0);
    }

    #[test]
    fn v_loss_matches_definition() {
        let a = AlphaLevel::new(0.9).unwrap();
        assert_eq!(a.v_loss(1.0), 0.9);
        assert!((a.v_loss(-1.0) - 0.1).abs() < 1e-15);
        assert_eq!(a.v_loss(0.0), 0.0);
    }

    #[test]
    fn u_score_is_nondecreasing_and_sign_preserving() {
        let a = AlphaLevel::new(0.7).unwrap();
        let xs = [-3.0, -1.0, -1e-9, 0.0, 1e-9, 0.5, 4.0];
        for w in xs.windows(2) {
            assert!(a.u_score(w[0]) <= a.u_score(w[1]));
        }
        for &x in &xs {
            assert!(a.u_score(x).signum() * x.signum() >= 0.0);
        }
    }
}
