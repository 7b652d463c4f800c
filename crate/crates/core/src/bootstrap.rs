//! Resampling weights (multinomial, normalized i.i.d., wrapped blocks), the
//! bootstrap distribution of the rescaled expectile error, and confidence
//! intervals built from it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaLevel;
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::expectile::{expectile_empirical, DEFAULT_TOL};
use crate::model::std_normal_cdf;

/// Law of the i.i.d. draws behind the normalized-weight bootstrap. The
/// defining constraint is a strictly positive mean equal to the standard
/// deviation, which the exponential family satisfies at every scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    Exponential { mean: f64 },
}

impl Default for WeightLaw {
    fn default() -> Self {
        WeightLaw::Exponential { mean: 1.0 }
    }
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightLaw::Exponential { mean } if mean > 0.0 && mean.is_finite() => Ok(()),
            WeightLaw::Exponential { mean } => Err(Error::DomainError(format!(
                "weight-law mean must be positive, got {mean}"
            ))),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightLaw::Exponential { mean } => Exp::new(1.0 / mean).unwrap().sample(rng),
        }
    }
}

/// Resampling scheme for the weighted empirical distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum BootstrapScheme {
    /// Multinomial counts over the observations.
    Efron,
    /// i.i.d. positive draws normalized by their mean.
    Bayesian { law: WeightLaw },
    /// Coverage counts of wrapped blocks of fixed length; requires the block
    /// length to divide n. Preserves short-range dependence.
    CircularBlock { block_length: usize },
}

impl BootstrapScheme {
    pub fn bayesian_default() -> Self {
        BootstrapScheme::Bayesian {
            law: WeightLaw::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            BootstrapScheme::Efron => Ok(()),
            BootstrapScheme::Bayesian { law } => law.validate(),
            BootstrapScheme::CircularBlock { block_length } => {
                if block_length == 0 || block_length >= n || n % block_length != 0 {
                    Err(Error::InvalidBlockLength {
                        block: block_length,
                        n,
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Draws one weight vector in observation (time) order.
    pub fn draw_weights<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        match *self {
            BootstrapScheme::Efron => Ok(efron_weights(n, rng)),
            BootstrapScheme::Bayesian { law } => bayesian_weights(n, law, rng),
            BootstrapScheme::CircularBlock { block_length } => {
                circular_block_weights(n, block_length, rng)
            }
        }
    }
}

/// Largest divisor of `n` not exceeding `n^(1/3)`; the default circular
/// block length.
pub fn default_block_length(n: usize) -> usize {
    let cap = (n as f64).powf(1.0 / 3.0).floor() as usize;
    (1..=cap.max(1)).rev().find(|l| n % l == 0).unwrap_or(1)
}

/// Multinomial resampling counts with parameters `(n, 1/n, ..., 1/n)`.
pub fn efron_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for _ in 0..n {
        w[rng.gen_range(0..n)] += 1.0;
    }
    w
}

/// Weights `Y_i / mean(Y)` for i.i.d. nonnegative draws `Y_i`; sums to n by
/// construction. Redraws on an all-zero sample and gives up after 100 tries.
pub fn bayesian_weights<R: Rng>(n: usize, law: WeightLaw, rng: &mut R) -> Result<Vec<f64>> {
    law.validate()?;
    for _ in 0..100 {
        let y: Vec<f64> = (0..n).map(|_| law.sample(rng)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        if mean > 0.0 {
            return Ok(y.into_iter().map(|v| v / mean).collect());
        }
    }
    Err(Error::DegenerateDraw(100))
}

/// Number of wrapped blocks covering each index: `k = n / block_length`
/// start indices drawn uniformly, each block covering `block_length`
/// consecutive positions modulo n. Total mass is exactly n.
pub fn circular_block_weights<R: Rng>(
    n: usize,
    block_length: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if block_length == 0 || block_length >= n || n % block_length != 0 {
        return Err(Error::InvalidBlockLength {
            block: block_length,
            n,
        });
    }
    let k = n / block_length;
    let starts: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
    Ok(block_coverage(n, block_length, &starts))
}

/// Coverage counts of wrapped blocks with the given (0-based) start indices.
fn block_coverage(n: usize, block_length: usize, starts: &[usize]) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for &start in starts {
        for t in 0..block_length {
            w[(start + t) % n] += 1.0;
        }
    }
    w
}

/// Replicates of `sqrt(n) (R(F*) - R(F_hat))` under a resampling scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    pub replicates: Vec<f64>,
    pub alpha: AlphaLevel,
    pub scheme: BootstrapScheme,
    pub base_estimate: f64,
    pub n: usize,
}

/// Draws `b_reps` bootstrap replicates by re-solving the weighted expectile.
///
/// `data` stays in observation order; the block scheme relies on it.
/// Replicate `b` consumes the ChaCha stream `(seed, b)`, so the result is
/// identical for every worker-thread count.
pub fn bootstrap_distribution(
    data: &[f64],
    alpha: AlphaLevel,
    scheme: BootstrapScheme,
    b_reps: usize,
    seed: u64,
) -> Result<BootstrapDistribution> {
    let n = data.len();
    if n == 0 {
        return Err(Error::InvalidSample("bootstrap needs n >= 1".into()));
    }
    if b_reps == 0 {
        return Err(Error::TooFewReplicates { min: 1, got: 0 });
    }
    scheme.validate(n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| data[i].total_cmp(&data[j]));
    let sorted_points: Vec<f64> = order.iter().map(|&i| data[i]).collect();

    let base_dist =
        EmpiricalDistribution::from_sorted(sorted_points.clone(), vec![1.0; n], n as f64);
    let base = expectile_empirical(&base_dist, alpha, DEFAULT_TOL)?;
    let sqrt_n = (n as f64).sqrt();

    let replicates: Result<Vec<f64>> = (0..b_reps as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let weights_time = scheme.draw_weights(n, &mut rng)?;
            let weights_sorted: Vec<f64> = order.iter().map(|&i| weights_time[i]).collect();
            let total: f64 = weights_sorted.iter().sum();
            let reweighted =
                EmpiricalDistribution::from_sorted(sorted_points.clone(), weights_sorted, total);
            let star = expectile_empirical(&reweighted, alpha, DEFAULT_TOL)?;
            Ok(sqrt_n * (star.value - base.value))
        })
        .collect();

    Ok(BootstrapDistribution {
        replicates: replicates?,
        alpha,
        scheme,
        base_estimate: base.value,
        n,
    })
}

/// Confidence-interval construction from bootstrap replicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiKind {
    /// Base estimate shifted by the replicate quantiles.
    Percentile,
    /// Replicate quantiles reflected around the base estimate.
    Basic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Linear-interpolation quantile of pre-sorted values.
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let i = h.floor() as usize;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    sorted[i] + (h - i as f64) * (sorted[i + 1] - sorted[i])
}

/// Percentile or basic CI at `level` from a bootstrap distribution.
pub fn ci_from_bootstrap(
    bd: &BootstrapDistribution,
    level: f64,
    kind: CiKind,
) -> Result<ConfidenceInterval> {
    if bd.replicates.len() < 20 {
        return Err(Error::TooFewReplicates {
            min: 20,
            got: bd.replicates.len(),
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::DomainError(format!(
            "confidence level {level} outside (0,1)"
        )));
    }
    let mut sorted = bd.replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let sqrt_n = (bd.n as f64).sqrt();
    let q_lo = sorted_quantile(&sorted, 0.5 * (1.0 - level)) / sqrt_n;
    let q_hi = sorted_quantile(&sorted, 0.5 * (1.0 + level)) / sqrt_n;
    let (lower, upper) = match kind {
        CiKind::Percentile => (bd.base_estimate + q_lo, bd.base_estimate + q_hi),
        CiKind::Basic => (bd.base_estimate - q_hi, bd.base_estimate - q_lo),
    };
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of the replicates
/// and the centered normal with variance `s2`.
pub fn ks_distance(replicates: &[f64], s2: f64) -> Result<f64> {
    if replicates.is_empty() {
        return Err(Error::InvalidSample(
            "KS distance needs at least one replicate".into(),
        ));
    }
    if !(s2 > 0.0) {
        return Err(Error::ZeroVariance(s2));
    }
    let sd = s2.sqrt();
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let phi = std_normal_cdf(x / sd);
        sup = sup.max((phi - i as f64 / n).abs());
        sup = sup.max(((i + 1) as f64 / n - phi).abs());
    }
    Ok(sup)
}
