use serde::{Deserialize, Serialize};

use crate::alpha::AlphaLevel;
use crate::error::{Error, Result};

/// Weight-sum slack: weights must total n within `1e-9 * n`.
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// A discrete distribution given by sorted atoms with nonnegative weights
/// summing to n. Uniform weights represent the plain empirical distribution
/// function; general weights represent its bootstrap reweightings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    points: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
    /// prefix_w[k] = sum of weights[0..k]
    prefix_w: Vec<f64>,
    /// prefix_wx[k] = sum of weights[i] * points[i] for i in 0..k
    prefix_wx: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Uniform-weight empirical distribution of a sample (order irrelevant).
    pub fn from_sample(sample: &[f64]) -> Result<Self> {
        Self::from_weighted(sample.to_vec(), vec![1.0; sample.len()])
    }

    /// Weighted empirical distribution; `points` need not be sorted, weights
    /// must be nonnegative and sum to `points.len()` within tolerance.
    pub fn from_weighted(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample(
                "sample must contain n >= 1 points".into(),
            ));
        }
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch(points.len(), weights.len()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSample(
                "sample contains non-finite values".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSample(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let n = points.len() as f64;
        let sum: f64 = weights.iter().sum();
        if (sum - n).abs() > WEIGHT_SUM_TOL * n {
            return Err(Error::InvalidSample(format!(
                "weights sum to {sum}, expected {n}"
            )));
        }
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
        let sorted_points: Vec<f64> = idx.iter().map(|&i| points[i]).collect();
        let sorted_weights: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
        Ok(Self::from_sorted(sorted_points, sorted_weights, sum))
    }

    /// Builds from pre-sorted points; used on the bootstrap hot path where the
    /// sort permutation of the base sample is reused across replicates.
    pub(crate) fn from_sorted(points: Vec<f64>, weights: Vec<f64>, total: f64) -> Self {
        let mut prefix_w = Vec::with_capacity(points.len() + 1);
        let mut prefix_wx = Vec::with_capacity(points.len() + 1);
        let mut acc_w = 0.0;
        let mut acc_wx = 0.0;
        prefix_w.push(0.0);
        prefix_wx.push(0.0);
        for (x, w) in points.iter().zip(&weights) {
            acc_w += w;
            acc_wx += w * x;
            prefix_w.push(acc_w);
            prefix_wx.push(acc_wx);
        }
        Self {
            points,
            weights,
            total,
            prefix_w,
            prefix_wx,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorted atoms.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Weights aligned with [`points`](Self::points).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.prefix_wx[self.len()] / self.total
    }

    /// Right-continuous distribution function `(1/n) sum w_i 1[x_i <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&p| p <= x);
        self.prefix_w[k] / self.total
    }

    /// Number of atoms strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p < x)
    }

    /// `(1/n) sum w_i U_alpha(x_i - m)`, continuous and nonincreasing in `m`.
    pub fn u_curve(&self, alpha: AlphaLevel, m: f64) -> f64 {
        let a = alpha.value();
        let k = self.count_below(m); // points[0..k] < m <= points[k..]
        let n = self.len();
        let w_lo = self.prefix_w[k];
        let wx_lo = self.prefix_wx[k];
        let w_hi = self.prefix_w[n] - w_lo;
        let wx_hi = self.prefix_wx[n] - wx_lo;
        (a * (wx_hi - w_hi * m) + (1.0 - a) * (wx_lo - w_lo * m)) / self.total
    }

    /// Left derivative in `m` of [`u_curve`](Self::u_curve):
    /// `-[(1-alpha) F(m-) + alpha (1 - F(m-))]`, extended to the a.e. value.
    pub fn u_curve_derivative(&self, alpha: AlphaLevel, m: f64) -> f64 {
        let a = alpha.value();
        let f = self.prefix_w[self.count_below(m)] / self.total;
        -((1.0 - a) * f + a * (1.0 - f))
    }

    /// Mean of the asymmetric quadratic loss at `m`.
    pub fn v_objective(&self, alpha: AlphaLevel, m: f64) -> f64 {
        let mut acc = 0.0;
        for (x, w) in self.points.iter().zip(&self.weights) {
            acc += w * alpha.v_loss(x - m);
        }
        acc / self.total
    }

    /// Left-continuous quantile `inf { x : F(x) >= p }`.
    pub fn quantile(&self, p: f64) -> f64 {
        let target = p.clamp(0.0, 1.0) * self.total;
        let k = self.prefix_w[1..=self.len()]
            .partition_point(|&acc| acc < target - 1e-12 * self.total.max(1.0));
        self.points[k.min(self.len() - 1)]
    }

    /// Upper partial moment `E[(X - t)^+]` against the weighted atoms.
    pub fn upper_partial_moment(&self, t: f64) -> f64 {
        let n = self.len();
        let k = self.points.partition_point(|&p| p <= t);
        let w_hi = self.prefix_w[n] - self.prefix_w[k];
        let wx_hi = self.prefix_wx[n] - self.prefix_wx[k];
        (wx_hi - w_hi * t) / self.total
    }

    /// Lower partial moment `E[(t - X)^+] = integral of F over (-inf, t)`.
    pub fn lower_partial_moment(&self, t: f64) -> f64 {
        self.upper_partial_moment(t) - self.mean() + t
    }
}
