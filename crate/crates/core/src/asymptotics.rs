//! Influence weights, the functional derivative of the expectile map, and
//! plug-in estimators of the limit variance for independent and weakly
//! dependent observations.

use serde::{Deserialize, Serialize};

use crate::alpha::AlphaLevel;
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::expectile::{expectile_empirical, expectile_model, ExpectileEstimate, DEFAULT_TOL};
use crate::model::Distribution;
use crate::quad::{integrate_lower_tail, integrate_upper_tail};
use crate::wasserstein::CdfSource;

/// Ingredients of the influence weight at a fixed distribution: the
/// expectile, the distribution function evaluated there, and the strictly
/// positive denominator `(1 - 2 alpha) F(R) + alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceSpec {
    pub alpha: AlphaLevel,
    pub expectile: f64,
    pub cdf_at_expectile: f64,
    pub denominator: f64,
}

impl InfluenceSpec {
    pub fn new(alpha: AlphaLevel, expectile: f64, cdf_at_expectile: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&cdf_at_expectile) {
            return Err(Error::DomainError(format!(
                "cdf value {cdf_at_expectile} outside [0, 1]"
            )));
        }
        let a = alpha.value();
        let denominator = (1.0 - 2.0 * a) * cdf_at_expectile + a;
        if denominator <= 0.0 {
            return Err(Error::ZeroVariance(denominator));
        }
        Ok(Self {
            alpha,
            expectile,
            cdf_at_expectile,
            denominator,
        })
    }

    pub fn from_estimate(est: &ExpectileEstimate, cdf_at_expectile: f64) -> Result<Self> {
        Self::new(est.alpha, est.value, cdf_at_expectile)
    }
}

/// Piecewise-constant influence weight with a single jump at the expectile:
/// `(1 - alpha)/den` on `(-inf, R]`, `alpha/den` on `(R, inf)`.
pub fn influence_weight(spec: &InfluenceSpec, t: f64) -> f64 {
    let a = spec.alpha.value();
    if t <= spec.expectile {
        (1.0 - a) / spec.denominator
    } else {
        a / spec.denominator
    }
}

/// An absolutely integrable perturbation of a distribution function.
pub enum Tangent<'a> {
    /// `v = sum c_i F_i`; a difference of distribution functions when the
    /// coefficients sum to zero. Integrated exactly through partial moments.
    Combination(Vec<(f64, CdfSource<'a>)>),
    /// Arbitrary integrable function, integrated by adaptive quadrature.
    Function(Box<dyn Fn(f64) -> f64 + Sync + 'a>),
}

impl<'a> Tangent<'a> {
    /// The difference `G - F`.
    pub fn difference(g: CdfSource<'a>, f: CdfSource<'a>) -> Self {
        Tangent::Combination(vec![(1.0, g), (-1.0, f)])
    }

    pub fn scaled(self, c: f64) -> Self {
        match self {
            Tangent::Combination(terms) => {
                Tangent::Combination(terms.into_iter().map(|(w, s)| (c * w, s)).collect())
            }
            Tangent::Function(f) => Tangent::Function(Box::new(move |x| c * f(x))),
        }
    }

    /// `(int_(-inf,m) v, int_(m,inf) v)`.
    fn split_integrals(&self, m: f64) -> Result<(f64, f64)> {
        match self {
            Tangent::Combination(terms) => {
                let mut lower = 0.0;
                let mut upper = 0.0;
                let mut csum = 0.0;
                for (c, s) in terms {
                    // int_(-inf,m) F = E[(m - X)^+] and int_(m,inf) F diverges
                    // termwise, but the coefficients of a tangent sum to zero,
                    // so sum c_i int_(m,inf) F_i = -sum c_i E[(X - m)^+].
                    lower += c * s.lower_partial_moment(m);
                    upper += -c * s.upper_partial_moment(m);
                    csum += c;
                }
                if csum.abs() > 1e-9 {
                    return Err(Error::NonIntegrable(format!(
                        "combination coefficients sum to {csum}, not zero"
                    )));
                }
                Ok((lower, upper))
            }
            Tangent::Function(f) => {
                let tol = 1e-11;
                let lower = integrate_lower_tail(&**f, m, tol)
                    .ok_or_else(|| Error::NonIntegrable("lower tail did not settle".into()))?;
                let upper = integrate_upper_tail(&**f, m, tol)
                    .ok_or_else(|| Error::NonIntegrable("upper tail did not settle".into()))?;
                Ok((lower, upper))
            }
        }
    }
}

/// First-order response of the expectile to a perturbation `v` of the
/// distribution function:
/// `-[(1-alpha) int_(-inf,R) v + alpha int_(R,inf) v] / [(1-2 alpha) F(R) + alpha]`.
pub fn qh_derivative(base: CdfSource<'_>, v: &Tangent<'_>, alpha: AlphaLevel) -> Result<f64> {
    let est = match base {
        CdfSource::Empirical(d) => expectile_empirical(d, alpha, 1e-12)?,
        CdfSource::Model(m) => expectile_model(m, alpha, 1e-12)?,
    };
    let den = est.denominator;
    let (lower, upper) = v.split_integrals(est.value)?;
    let a = alpha.value();
    Ok(-((1.0 - a) * lower + a * upper) / den)
}

/// How a limit-variance estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMethod {
    IidPlugin,
    LongrunSeries,
    LongrunDoubleIntegral,
}

/// Estimated limit variance of `sqrt(n) (R(F_hat) - R(F))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub s2: f64,
    pub method: VarianceMethod,
    pub lag: Option<usize>,
    /// Set when the sample was constant (zero variance, formulas degenerate).
    pub degenerate: bool,
}

/// i.i.d. plug-in variance `(1/n) sum w_i U_alpha(x_i - m*)^2 / d^2`.
pub fn iid_variance(dist: &EmpiricalDistribution, alpha: AlphaLevel) -> Result<VarianceEstimate> {
    if dist.len() < 2 {
        return Err(Error::InvalidSample(
            "variance estimation needs n >= 2".into(),
        ));
    }
    let est = expectile_empirical(dist, alpha, DEFAULT_TOL)?;
    if dist.min() == dist.max() {
        return Ok(VarianceEstimate {
            s2: 0.0,
            method: VarianceMethod::IidPlugin,
            lag: None,
            degenerate: true,
        });
    }
    let mut acc = 0.0;
    for (x, w) in dist.points().iter().zip(dist.weights()) {
        let u = alpha.u_score(x - est.value);
        acc += w * u * u;
    }
    let n = dist.len() as f64;
    Ok(VarianceEstimate {
        s2: acc / n / (est.denominator * est.denominator),
        method: VarianceMethod::IidPlugin,
        lag: None,
        degenerate: false,
    })
}

/// Kernel used to weight autocovariance terms of the influence series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagKernel {
    /// Bartlett weights `1 - k/(L+1)` with divisor-n covariances; the
    /// estimate is nonnegative by construction.
    Bartlett,
    /// Unit weights with per-lag divisor `n - k`; matches the double-integral
    /// form term by term but is not sign-constrained. Oracle use only.
    Flat,
}

fn influence_series(series: &[f64], alpha: AlphaLevel) -> Result<(Vec<f64>, ExpectileEstimate)> {
    let dist = EmpiricalDistribution::from_sample(series)?;
    let est = expectile_empirical(&dist, alpha, DEFAULT_TOL)?;
    let z = series
        .iter()
        .map(|x| alpha.u_score(x - est.value) / est.denominator)
        .collect();
    Ok((z, est))
}

/// Long-run variance of the influence series `Z_t = U_alpha(X_t - m*) / d`,
/// for observations kept in time order:
/// `gamma_0 + 2 sum_{k=1..max_lag} w_k gamma_k`.
///
/// The series has mean zero up to solver tolerance (that is the estimating
/// equation), so the covariances are left uncentered; `max_lag = 0` then
/// reproduces [`iid_variance`] bit for bit.
pub fn longrun_variance(
    series: &[f64],
    alpha: AlphaLevel,
    max_lag: usize,
    kernel: LagKernel,
) -> Result<VarianceEstimate> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidSample(
            "variance estimation needs n >= 2".into(),
        ));
    }
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, n });
    }
    if series.iter().all(|x| *x == series[0]) {
        return Ok(VarianceEstimate {
            s2: 0.0,
            method: VarianceMethod::LongrunSeries,
            lag: Some(max_lag),
            degenerate: true,
        });
    }
    if max_lag == 0 {
        // the lag-free long-run variance is the plug-in variance itself;
        // delegate so the two agree bit for bit
        let v = iid_variance(&EmpiricalDistribution::from_sample(series)?, alpha)?;
        return Ok(VarianceEstimate {
            s2: v.s2,
            method: VarianceMethod::LongrunSeries,
            lag: Some(0),
            degenerate: v.degenerate,
        });
    }
    let (z, _) = influence_series(series, alpha)?;
    let nf = n as f64;
    let mut s2 = z.iter().map(|v| v * v).sum::<f64>() / nf;
    for k in 1..=max_lag {
        let dot: f64 = z[..n - k].iter().zip(&z[k..]).map(|(a, b)| a * b).sum();
        let (weight, divisor) = match kernel {
            LagKernel::Bartlett => (1.0 - k as f64 / (max_lag as f64 + 1.0), nf),
            LagKernel::Flat => (1.0, (n - k) as f64),
        };
        s2 += 2.0 * weight * dot / divisor;
    }
    if kernel == LagKernel::Bartlett {
        s2 = s2.max(0.0);
    }
    Ok(VarianceEstimate {
        s2,
        method: VarianceMethod::LongrunSeries,
        lag: Some(max_lag),
        degenerate: false,
    })
}

/// Default truncation lag `floor(n^(1/3))`.
pub fn default_max_lag(n: usize) -> usize {
    (n as f64).powf(1.0 / 3.0).floor() as usize
}

/// Brute-force evaluation of the limit variance as the double integral of
/// the influence weight against the long-run covariance kernel
/// `C(t0, t1) = F(t0 ^ t1)(1 - F(t0 v t1)) + lag covariances`, with all
/// ingredients replaced by their empirical counterparts.
///
/// Trapezoid rule on a `grid`-point axis over the central quantile range of
/// the sample; the integrand vanishes outside the sample range, so the
/// truncation is exact here. Test oracle: O(n * grid) after factoring the
/// rank-one lag terms, but deliberately literal otherwise.
pub fn longrun_variance_double_integral(
    series: &[f64],
    alpha: AlphaLevel,
    max_lag: usize,
    grid: usize,
) -> Result<VarianceEstimate> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidSample(
            "variance estimation needs n >= 2".into(),
        ));
    }
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, n });
    }
    if grid < 2 {
        return Err(Error::DomainError("grid must have at least 2 nodes".into()));
    }
    let dist = EmpiricalDistribution::from_sample(series)?;
    let est = expectile_empirical(&dist, alpha, DEFAULT_TOL)?;
    let spec = InfluenceSpec::from_estimate(&est, dist.cdf(est.value))?;

    let lo = dist.quantile(1e-4);
    let hi = dist.quantile(1.0 - 1e-4);
    if lo == hi {
        return Ok(VarianceEstimate {
            s2: 0.0,
            method: VarianceMethod::LongrunDoubleIntegral,
            lag: Some(max_lag),
            degenerate: true,
        });
    }
    let h = (hi - lo) / (grid - 1) as f64;
    let nodes: Vec<f64> = (0..grid).map(|i| lo + h * i as f64).collect();
    let cdf: Vec<f64> = nodes.iter().map(|&t| dist.cdf(t)).collect();
    // trapezoid weight times influence weight at each node
    let a: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let w = if i == 0 || i == grid - 1 { 0.5 * h } else { h };
            w * influence_weight(&spec, t)
        })
        .collect();

    // independent part: sum_{i,k} a_i a_k F(min)(1 - F(max)), factored by
    // splitting at the diagonal
    let mut part_iid = 0.0;
    let mut prefix = 0.0; // sum_{i<k} a_i F_i
    for k in 0..grid {
        let afk = a[k] * (1.0 - cdf[k]);
        part_iid += afk * (2.0 * prefix + a[k] * cdf[k]);
        prefix += a[k] * cdf[k];
    }

    // lag part: each empirical covariance is a sum of rank-one terms in
    // (dev_t, dev_{t+k}); fold the grid integral into per-observation dots
    // z_t = sum_i a_i (1[x_t <= node_i] - F(node_i))
    let z: Vec<f64> = series
        .iter()
        .map(|&x| {
            let mut acc = 0.0;
            for (i, &node) in nodes.iter().enumerate() {
                let ind = if x <= node { 1.0 } else { 0.0 };
                acc += a[i] * (ind - cdf[i]);
            }
            acc
        })
        .collect();
    let mut part_lag = 0.0;
    for k in 1..=max_lag {
        let dot: f64 = z[..n - k].iter().zip(&z[k..]).map(|(p, q)| p * q).sum();
        part_lag += 2.0 * dot / (n - k) as f64;
    }

    Ok(VarianceEstimate {
        s2: part_iid + part_lag,
        method: VarianceMethod::LongrunDoubleIntegral,
        lag: Some(max_lag),
        degenerate: false,
    })
}
