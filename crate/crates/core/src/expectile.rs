//! The expectile as the unique zero of the decreasing score curve
//! `m -> E[U_alpha(X - m)]`, for empirical and analytic distributions.

use serde::{Deserialize, Serialize};

use crate::alpha::AlphaLevel;
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::model::Distribution;
use crate::solve::{decreasing_root, expanding_bracket};

/// Default relative tolerance of the expectile solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Solved expectile together with the ingredients reused by the asymptotic
/// formulas: the sample size (when empirical) and the strictly positive
/// denominator `(1 - 2 alpha) F(m*) + alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectileEstimate {
    pub alpha: AlphaLevel,
    pub value: f64,
    /// Sample size; `None` for analytic distributions.
    pub n: Option<usize>,
    pub denominator: f64,
}

/// Asymmetric linear score `U_alpha`.
pub fn u_score(alpha: AlphaLevel, x: f64) -> f64 {
    alpha.u_score(x)
}

/// Asymmetric quadratic loss `V_alpha`.
pub fn v_loss(alpha: AlphaLevel, x: f64) -> f64 {
    alpha.v_loss(x)
}

/// `(1/n) sum w_i U_alpha(x_i - m)`.
pub fn u_curve_empirical(dist: &EmpiricalDistribution, alpha: AlphaLevel, m: f64) -> f64 {
    dist.u_curve(alpha, m)
}

fn denominator_at(f_at_m: f64, alpha: AlphaLevel) -> f64 {
    let a = alpha.value();
    (1.0 - 2.0 * a) * f_at_m + a
}

/// Empirical expectile: the unique root of the weighted score curve.
///
/// The root always lies in `[min, max]` of the support, so bisection is
/// safe; Newton steps on the piecewise-linear curve then land on the root to
/// machine precision.
pub fn expectile_empirical(
    dist: &EmpiricalDistribution,
    alpha: AlphaLevel,
    tol: f64,
) -> Result<ExpectileEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let value = if dist.min() == dist.max() {
        dist.min()
    } else {
        decreasing_root(
            |m| dist.u_curve(alpha, m),
            |m| dist.u_curve_derivative(alpha, m),
            dist.min(),
            dist.max(),
            tol,
        )
    };
    Ok(ExpectileEstimate {
        alpha,
        value,
        n: Some(dist.len()),
        denominator: denominator_at(dist.cdf(value), alpha),
    })
}

/// Score curve of an analytic distribution, written with partial moments:
/// `alpha E[(X-m)^+] - (1-alpha) E[(m-X)^+]
///  = (2 alpha - 1) UPM(m) + (1 - alpha)(mean - m)`.
pub fn u_curve_model<D: Distribution + ?Sized>(dist: &D, alpha: AlphaLevel, m: f64) -> f64 {
    let a = alpha.value();
    (2.0 * a - 1.0) * dist.upper_partial_moment(m) + (1.0 - a) * (dist.mean() - m)
}

/// Expectile of an analytic distribution via a bracket expanded from the
/// mean in doubling steps, then the shared bisection/Newton iteration.
pub fn expectile_model<D: Distribution + ?Sized>(
    dist: &D,
    alpha: AlphaLevel,
    tol: f64,
) -> Result<ExpectileEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mean = dist.mean();
    if !mean.is_finite() {
        return Err(Error::DomainError("distribution mean is not finite".into()));
    }
    let f = |m: f64| u_curve_model(dist, alpha, m);
    let a = alpha.value();
    let df = |m: f64| {
        let fm = dist.cdf(m);
        -((1.0 - a) * fm + a * (1.0 - fm))
    };
    let max_doublings = 200;
    let (lo, hi) = expanding_bracket(f, mean, 1.0 + mean.abs() * 1e-3, max_doublings)
        .ok_or(Error::BracketingFailure(max_doublings))?;
    let value = decreasing_root(f, df, lo, hi, tol);
    Ok(ExpectileEstimate {
        alpha,
        value,
        n: None,
        denominator: denominator_at(dist.cdf(value), alpha),
    })
}
