//! Quantile-based risk measures on empirical data and the coherence-axiom
//! checks for the empirical expectile.

use serde::{Deserialize, Serialize};

use crate::alpha::AlphaLevel;
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::expectile::{expectile_empirical, DEFAULT_TOL};

/// Value at risk: the left-continuous quantile of the empirical distribution.
pub fn var_quantile(dist: &EmpiricalDistribution, alpha: AlphaLevel) -> f64 {
    dist.quantile(alpha.value())
}

/// Average value at risk `(1/(1-alpha)) int_(alpha,1) quantile(s) ds`,
/// computed exactly on the step quantile function of the sorted atoms.
pub fn avar(dist: &EmpiricalDistribution, alpha: AlphaLevel) -> f64 {
    let a = alpha.value();
    let n = dist.len() as f64;
    let mut acc = 0.0;
    let mut cum = 0.0;
    for (x, w) in dist.points().iter().zip(dist.weights()) {
        let lo = cum / n;
        cum += w;
        let hi = cum / n;
        let overlap = hi.min(1.0) - lo.max(a);
        if overlap > 0.0 {
            acc += x * overlap;
        }
    }
    acc / (1.0 - a)
}

/// Violation magnitudes of the coherence axioms measured on a pair of
/// aligned samples (comonotonic realizations of two random variables).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AxiomReport {
    /// |rho(X + c) - rho(X) - c|
    pub cash_invariance_gap: f64,
    /// |rho(s X) - s rho(X)|
    pub homogeneity_gap: f64,
    /// Whether X1 <= X2 held elementwise (otherwise monotonicity is vacuous).
    pub pointwise_ordered: bool,
    /// rho(X1) <= rho(X2) given pointwise order, with slack.
    pub monotone: bool,
    /// rho(X1 + X2) - rho(X1) - rho(X2); positive values witness a
    /// subadditivity violation.
    pub subadditivity_excess: f64,
    pub subadditive: bool,
}

/// Checks cash-invariance, positive homogeneity, monotonicity, and
/// subadditivity of the empirical expectile on a pair of equal-length
/// samples. A subadditivity excess is expected to be possible only for
/// `alpha < 1/2`.
pub fn check_axioms(
    x1: &[f64],
    x2: &[f64],
    alpha: AlphaLevel,
    cash: f64,
    scale: f64,
) -> Result<AxiomReport> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch(x1.len(), x2.len()));
    }
    if scale < 0.0 {
        return Err(Error::DomainError(format!(
            "scale must be nonnegative, got {scale}"
        )));
    }
    let rho = |xs: &[f64]| -> Result<f64> {
        Ok(
            expectile_empirical(&EmpiricalDistribution::from_sample(xs)?, alpha, DEFAULT_TOL)?
                .value,
        )
    };
    let r1 = rho(x1)?;
    let r2 = rho(x2)?;
    let shifted: Vec<f64> = x1.iter().map(|x| x + cash).collect();
    let scaled: Vec<f64> = x1.iter().map(|x| x * scale).collect();
    let summed: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + b).collect();
    let r_shift = rho(&shifted)?;
    let r_scale = if scale == 0.0 { 0.0 } else { rho(&scaled)? };
    let r_sum = rho(&summed)?;

    let scale_of = |r: f64| 1.0 + r.abs();
    let slack = 2.0 * DEFAULT_TOL;
    let pointwise_ordered = x1.iter().zip(x2).all(|(a, b)| a <= b);
    let subadditivity_excess = r_sum - r1 - r2;
    Ok(AxiomReport {
        cash_invariance_gap: (r_shift - r1 - cash).abs(),
        homogeneity_gap: (r_scale - scale * r1).abs(),
        pointwise_ordered,
        monotone: !pointwise_ordered || r1 <= r2 + slack * scale_of(r2),
        subadditivity_excess,
        subadditive: subadditivity_excess <= slack * scale_of(r_sum),
    })
}
