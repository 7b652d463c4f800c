use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

/// Standard normal distribution function.
pub fn std_normal_cdf(z: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(z)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile function.
pub fn std_normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Minimal distribution-function interface needed by the expectile solver:
/// the distribution function itself, its mean, and the upper partial moment
/// `E[(X - t)^+]`. Everything else (score curves, lower partial moments)
/// derives from these three.
pub trait Distribution {
    fn cdf(&self, x: f64) -> f64;
    fn mean(&self) -> f64;
    fn upper_partial_moment(&self, t: f64) -> f64;

    fn lower_partial_moment(&self, t: f64) -> f64 {
        self.upper_partial_moment(t) - self.mean() + t
    }
}

impl Distribution for EmpiricalDistribution {
    fn cdf(&self, x: f64) -> f64 {
        EmpiricalDistribution::cdf(self, x)
    }
    fn mean(&self) -> f64 {
        EmpiricalDistribution::mean(self)
    }
    fn upper_partial_moment(&self, t: f64) -> f64 {
        EmpiricalDistribution::upper_partial_moment(self, t)
    }
}

/// Analytic distribution family with finite mean and closed-form partial
/// moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionModel {
    Normal {
        mu: f64,
        sigma2: f64,
    },
    LogNormal {
        m: f64,
        s2: f64,
    },
    /// Pareto with density `a c^a x^{-(a+1)}` on `(c, inf)`; `a > 1` for a
    /// finite mean.
    Pareto {
        a: f64,
        c_bar: f64,
    },
    /// Takes the value `x1` with probability `p` and `x0` otherwise (`x0 < x1`).
    TwoPoint {
        p: f64,
        x0: f64,
        x1: f64,
    },
}

impl DistributionModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Normal { mu, sigma2 } => mu.is_finite() && sigma2 > 0.0,
            Self::LogNormal { m, s2 } => m.is_finite() && s2 > 0.0,
            Self::Pareto { a, c_bar } => a > 1.0 && c_bar > 0.0,
            Self::TwoPoint { p, x0, x1 } => (0.0..=1.0).contains(&p) && x0 < x1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "invalid model parameters: {self:?}"
            )))
        }
    }

    /// Left-continuous quantile function.
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma2 } => mu + sigma2.sqrt() * std_normal_quantile(p),
            Self::LogNormal { m, s2 } => (m + s2.sqrt() * std_normal_quantile(p)).exp(),
            Self::Pareto { a, c_bar } => c_bar * (1.0 - p).powf(-1.0 / a),
            Self::TwoPoint { p: q, x0, x1 } => {
                if p <= 1.0 - q {
                    x0
                } else {
                    x1
                }
            }
        }
    }

    /// Average value at risk `(1/(1-p)) * integral of the quantile over (p, 1)`.
    pub fn avar(&self, p: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma2 } => {
                let z = std_normal_quantile(p);
                mu + sigma2.sqrt() * std_normal_pdf(z) / (1.0 - p)
            }
            Self::LogNormal { m, s2 } => {
                let s = s2.sqrt();
                let z = std_normal_quantile(p);
                (m + 0.5 * s2).exp() * std_normal_cdf(s - z) / (1.0 - p)
            }
            Self::Pareto { a, c_bar } => {
                // (1/(1-p)) int_p^1 c (1-u)^{-1/a} du
                a / (a - 1.0) * c_bar * (1.0 - p).powf(-1.0 / a)
            }
            Self::TwoPoint { p: q, x0, x1 } => {
                if p >= 1.0 - q {
                    x1
                } else {
                    // mass q at x1 plus the remaining stretch of x0
                    (x0 * (1.0 - q - p) + x1 * q) / (1.0 - p)
                }
            }
        }
    }
}

impl Distribution for DistributionModel {
    fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma2 } => std_normal_cdf((x - mu) / sigma2.sqrt()),
            Self::LogNormal { m, s2 } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - m) / s2.sqrt())
                }
            }
            Self::Pareto { a, c_bar } => {
                if x <= c_bar {
                    0.0
                } else {
                    1.0 - (c_bar / x).powf(a)
                }
            }
            Self::TwoPoint { p, x0, x1 } => {
                if x < x0 {
                    0.0
                } else if x < x1 {
                    1.0 - p
                } else {
                    1.0
                }
            }
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            Self::Normal { mu, .. } => mu,
            Self::LogNormal { m, s2 } => (m + 0.5 * s2).exp(),
            Self::Pareto { a, c_bar } => a * c_bar / (a - 1.0),
            Self::TwoPoint { p, x0, x1 } => (1.0 - p) * x0 + p * x1,
        }
    }

    fn upper_partial_moment(&self, t: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma2 } => {
                let s = sigma2.sqrt();
                let d = (mu - t) / s;
                (mu - t) * std_normal_cdf(d) + s * std_normal_pdf(d)
            }
            Self::LogNormal { m, s2 } => {
                if t <= 0.0 {
                    self.mean() - t
                } else {
                    let s = s2.sqrt();
                    (m + 0.5 * s2).exp() * std_normal_cdf((m + s2 - t.ln()) / s)
                        - t * std_normal_cdf((m - t.ln()) / s)
                }
            }
            Self::Pareto { a, c_bar } => {
                if t <= c_bar {
                    self.mean() - t
                } else {
                    c_bar.powf(a) * t.powf(1.0 - a) / (a - 1.0)
                }
            }
            Self::TwoPoint { p, x0, x1 } => p * (x1 - t).max(0.0) + (1.0 - p) * (x0 - t).max(0.0),
        }
    }
}

/// Finite mixture of analytic models; closes the family under the convex
/// perturbations `(1 - eps) F + eps G` used by derivative checks.
#[derive(Debug, Clone)]
pub struct Mixture {
    components: Vec<(f64, DistributionModel)>,
}

impl Mixture {
    pub fn new(components: Vec<(f64, DistributionModel)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DomainError(
                "mixture needs at least one component".into(),
            ));
        }
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::DomainError(
                "mixture weights must be nonnegative and sum to one".into(),
            ));
        }
        for (_, m) in &components {
            m.validate()?;
        }
        Ok(Self { components })
    }
}

impl Distribution for Mixture {
    fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, m)| w * m.cdf(x)).sum()
    }
    fn mean(&self) -> f64 {
        self.components.iter().map(|(w, m)| w * m.mean()).sum()
    }
    fn upper_partial_moment(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|(w, m)| w * m.upper_partial_moment(t))
            .sum()
    }
}
