//! Desk-scale statistical behavior of the experiments: bootstrap laws,
//! delta-method coverage, dependence-aware standardization, and the
//! three-estimator comparison.

use expectile_core::asymptotics::{iid_variance, longrun_variance_double_integral};
use expectile_core::bootstrap::{bootstrap_distribution, ks_distance, BootstrapScheme};
use expectile_core::mc::{
    comparison_table, consistency_experiment, coverage_experiment, normality_experiment,
    robustness_experiment, sample_model, CoverageMethod, DataGenerator, ExperimentOutcome,
    Standardizer,
};
use expectile_core::parametric::{hill_estimator, ParetoParams};
use expectile_core::{AlphaLevel, DistributionModel, EmpiricalDistribution};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn alpha(a: f64) -> AlphaLevel {
    AlphaLevel::new(a).unwrap()
}

// The double-integral form with no lag terms reproduces the i.i.d. plug-in
// variance on two-point data; this closes the loop between the influence
// weight, the covariance kernel, and the direct formula.
#[test]
fn two_point_double_integral_matches_iid_variance() {
    let xs = [0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    for a in [0.3, 0.55, 0.8] {
        let al = alpha(a);
        let iid = iid_variance(&EmpiricalDistribution::from_sample(&xs).unwrap(), al).unwrap();
        let oracle = longrun_variance_double_integral(&xs, al, 0, 4000).unwrap();
        assert!(
            (iid.s2 - oracle.s2).abs() <= 1e-3 * iid.s2,
            "alpha {a}: iid {} oracle {}",
            iid.s2,
            oracle.s2
        );
    }
}

// Fair-coin sample: the Efron bootstrap law of the rescaled expectile error
// matches the closed-form normal limit.
#[test]
fn fair_coin_efron_bootstrap_matches_normal_limit() {
    let gen = DataGenerator::IidTwoPoint {
        p: 0.5,
        x0: 0.0,
        x1: 1.0,
    };
    let a = alpha(0.7);
    let xs = gen.generate(2000, 71).unwrap();
    let bd = bootstrap_distribution(&xs, a, BootstrapScheme::Efron, 2000, 72).unwrap();
    let s2 = 4.0 * 0.7f64.powi(2) * 0.3f64.powi(2);
    let ks = ks_distance(&bd.replicates, s2).unwrap();
    assert!(ks <= 0.05, "ks {ks}");
}

#[test]
fn hill_estimator_is_consistent_on_pareto_data() {
    let p = ParetoParams::new(3.0, 1.0).unwrap();
    let model = p.model();
    let n = 5000;
    let k = (n as f64).powf(0.4).floor() as usize;
    let reps = 50;
    let mut mean = 0.0;
    for r in 0..reps as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        rng.set_stream(r + 1);
        let xs: Vec<f64> = (0..n).map(|_| sample_model(&model, &mut rng)).collect();
        mean += hill_estimator(&xs, k, 1.0, 2.0).unwrap().a_hat / reps as f64;
    }
    assert!(
        (mean - p.a).abs() <= 0.1 * p.a,
        "mean Hill estimate {mean} vs {}",
        p.a
    );
}

#[test]
fn delta_method_lognormal_coverage_near_nominal() {
    let gen = DataGenerator::IidLogNormal { m: 0.0, s2: 1.0 };
    let rep = coverage_experiment(
        &gen,
        alpha(0.8),
        400,
        600,
        CoverageMethod::DeltaLogNormal {
            fallback_m: 0.0,
            fallback_s2: 1.0,
        },
        0.95,
        74,
    )
    .unwrap();
    match rep.outcome {
        ExperimentOutcome::Coverage { coverage, .. } => {
            assert!((0.92..=0.98).contains(&coverage), "coverage {coverage}");
        }
        _ => unreachable!(),
    }
}

#[test]
fn efron_coverage_on_iid_lognormal() {
    let gen = DataGenerator::IidLogNormal { m: 0.0, s2: 1.0 };
    let rep = coverage_experiment(
        &gen,
        alpha(0.7),
        1000,
        1000,
        CoverageMethod::Bootstrap {
            scheme: BootstrapScheme::Efron,
            b_reps: 400,
        },
        0.95,
        75,
    )
    .unwrap();
    match rep.outcome {
        ExperimentOutcome::Coverage { coverage, .. } => {
            assert!((0.92..=0.97).contains(&coverage), "coverage {coverage}");
        }
        _ => unreachable!(),
    }
}

#[test]
fn ar1_consistency_trend() {
    let gen = DataGenerator::Ar1 {
        phi: 0.5,
        innovation_s2: 1.0,
    };
    let rep = consistency_experiment(&gen, alpha(0.7), &[200, 2000, 20_000, 100_000], 76).unwrap();
    assert_eq!(rep.pass, Some(true), "{:?}", rep.outcome);
}

// Dependence matters for standardization: the long-run variance gives a
// normal fit, the naive i.i.d. variance does not.
#[test]
fn ar1_normality_longrun_vs_naive_standardization() {
    let gen = DataGenerator::Ar1 {
        phi: 0.5,
        innovation_s2: 1.0,
    };
    let a = alpha(0.7);
    let (n, reps) = (500, 1000);
    let good = normality_experiment(
        &gen,
        a,
        n,
        reps,
        Standardizer::LongrunOracle {
            path_len: 400_000,
            max_lag: 300,
        },
        77,
    )
    .unwrap();
    assert_eq!(good.pass, Some(true), "{:?}", good.outcome);

    let naive = normality_experiment(
        &gen,
        a,
        n,
        reps,
        Standardizer::IidOracle { path_len: 400_000 },
        77,
    )
    .unwrap();
    let (ks_good, ks_naive) = match (&good.outcome, &naive.outcome) {
        (
            ExperimentOutcome::Normality { ks: k1, .. },
            ExperimentOutcome::Normality { ks: k2, .. },
        ) => (*k1, *k2),
        _ => unreachable!(),
    };
    assert_eq!(
        naive.pass,
        Some(false),
        "naive ks {ks_naive} vs long-run ks {ks_good}"
    );
    assert!(ks_naive > 2.0 * ks_good);
}

#[test]
fn robustness_expectile_reacts_more_than_median() {
    let gen = DataGenerator::IidNormal { m: 0.0, s2: 1.0 };
    let outlier = DistributionModel::Normal {
        mu: 30.0,
        sigma2: 1.0,
    };
    let rep =
        robustness_experiment(&gen, alpha(0.9), &outlier, &[0.0, 0.01], 400, 300, 78).unwrap();
    match rep.outcome {
        ExperimentOutcome::Robustness {
            expectile_shift,
            median_shift,
            ..
        } => {
            assert!(
                expectile_shift[1] > median_shift[1],
                "expectile {} median {}",
                expectile_shift[1],
                median_shift[1]
            );
        }
        _ => unreachable!(),
    }
}

#[test]
fn comparison_table_normal_case_all_rows_behave() {
    let gen = DataGenerator::IidNormal { m: 0.0, s2: 1.0 };
    let rep = comparison_table(&gen, alpha(0.9), 1000, 400, 0.02, 79).unwrap();
    match rep.outcome {
        ExperimentOutcome::Comparison { rows, .. } => {
            for r in &rows {
                assert!(
                    r.consistency_error < 0.1,
                    "{}: {}",
                    r.functional,
                    r.consistency_error
                );
                assert!(
                    r.normality_ks < 0.08,
                    "{}: ks {}",
                    r.functional,
                    r.normality_ks
                );
            }
        }
        _ => unreachable!(),
    }
}

// At a quantile flat spot the empirical quantile is not asymptotically
// normal while the expectile still is (the marginal is continuous at it).
#[test]
fn comparison_table_flat_spot_var_fails_expectile_passes() {
    let gen = DataGenerator::IidTwoPoint {
        p: 0.5,
        x0: 0.0,
        x1: 1.0,
    };
    let rep = comparison_table(&gen, alpha(0.5), 500, 400, 0.0, 80).unwrap();
    match rep.outcome {
        ExperimentOutcome::Comparison { rows, .. } => {
            let var = rows.iter().find(|r| r.functional == "var").unwrap();
            let exp = rows.iter().find(|r| r.functional == "expectile").unwrap();
            assert!(var.normality_ks > 0.2, "var ks {}", var.normality_ks);
            assert!(exp.normality_ks < 0.08, "expectile ks {}", exp.normality_ks);
        }
        _ => unreachable!(),
    }
}
