//! Estimation of expectile-based risk measures: empirical and parametric
//! plug-in estimators, their asymptotic variances, bootstrap schemes for
//! confidence intervals, and a Monte Carlo harness that exercises the
//! consistency, normality, bootstrap, and robustness properties at desk
//! scale.

// `!(x > 0.0)` deliberately sends NaN down the rejection path
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

pub mod alpha;
pub mod asymptotics;
pub mod bootstrap;
pub mod empirical;
pub mod error;
pub mod expectile;
pub mod mc;
pub mod model;
pub mod parametric;
pub mod quad;
pub mod risk;
pub mod solve;
pub mod wasserstein;

pub use alpha::AlphaLevel;
pub use asymptotics::{
    default_max_lag, iid_variance, influence_weight, longrun_variance,
    longrun_variance_double_integral, qh_derivative, InfluenceSpec, LagKernel, Tangent,
    VarianceEstimate, VarianceMethod,
};
pub use bootstrap::{
    bayesian_weights, bootstrap_distribution, ci_from_bootstrap, circular_block_weights,
    default_block_length, efron_weights, ks_distance, BootstrapDistribution, BootstrapScheme,
    CiKind, ConfidenceInterval, WeightLaw,
};
pub use empirical::EmpiricalDistribution;
pub use error::{Error, Result};
pub use expectile::{
    expectile_empirical, expectile_model, u_curve_empirical, u_score, v_loss, ExpectileEstimate,
    DEFAULT_TOL,
};
pub use mc::{
    comparison_table, consistency_experiment, coverage_band, coverage_experiment, ks_two_sample,
    normality_experiment, robustness_experiment, sample_model, ComparisonRow, CoverageMethod,
    DataGenerator, ExperimentOutcome, ExperimentReport, ReportMeta, Standardizer,
};
pub use model::{Distribution, DistributionModel, Mixture};
pub use parametric::{
    default_hill_k, delta_method_ci, hill_estimator, lognormal_asym_variance,
    lognormal_asym_variance_with, lognormal_expectile, lognormal_hadamard_derivative,
    lognormal_mle, lognormal_partial_moment, pareto_asym_variance, pareto_expectile,
    pareto_hadamard_derivative, pareto_mle, pareto_partial_moment, AsymCov, FittedFamily,
    LogNormalFit, LogNormalParams, ParamEstimate, ParetoParams, PsiConvention, TailIndexFit,
};
pub use risk::{avar, check_axioms, var_quantile, AxiomReport};
pub use wasserstein::{wasserstein1, CdfSource};
