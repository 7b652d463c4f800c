//! Property tests for the algebraic invariants: score-curve monotonicity,
//! cash-invariance and homogeneity, weight-mass conservation, and the
//! translation/scaling laws of the variance estimators.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use expectile_core::asymptotics::{iid_variance, qh_derivative, Tangent};
use expectile_core::bootstrap::{
    bayesian_weights, circular_block_weights, efron_weights, BootstrapScheme, WeightLaw,
};
use expectile_core::{
    avar, expectile_empirical, var_quantile, AlphaLevel, DistributionModel, EmpiricalDistribution,
    DEFAULT_TOL,
};

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 2..40)
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.02..0.98f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_curve_is_nonincreasing(xs in sample_strategy(), a in alpha_strategy(),
                                m1 in -60.0..60.0f64, dm in 0.001..20.0f64) {
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        let al = AlphaLevel::new(a).unwrap();
        let m2 = m1 + dm;
        let u1 = d.u_curve(al, m1);
        let u2 = d.u_curve(al, m2);
        prop_assert!(u1 >= u2 - 1e-12);
        // strict drop whenever mass sits in (m1, m2]
        if xs.iter().any(|x| *x > m1 && *x <= m2) {
            prop_assert!(u1 > u2);
        }
    }

    #[test]
    fn expectile_at_half_is_the_mean(xs in sample_strategy()) {
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        let al = AlphaLevel::new(0.5).unwrap();
        let e = expectile_empirical(&d, al, DEFAULT_TOL).unwrap();
        let mean = d.mean();
        prop_assert!((e.value - mean).abs() <= 1e-10 * (1.0 + mean.abs()));
    }

    #[test]
    fn cash_invariance_and_homogeneity(xs in sample_strategy(), a in alpha_strategy(),
                                       cash in -20.0..20.0f64, scale in 0.01..8.0f64) {
        let al = AlphaLevel::new(a).unwrap();
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        let base = expectile_empirical(&d, al, DEFAULT_TOL).unwrap().value;

        let shifted: Vec<f64> = xs.iter().map(|x| x + cash).collect();
        let ds = EmpiricalDistribution::from_sample(&shifted).unwrap();
        let r_shift = expectile_empirical(&ds, al, DEFAULT_TOL).unwrap().value;
        let tol = 2.0 * DEFAULT_TOL * (1.0 + base.abs() + cash.abs());
        prop_assert!((r_shift - base - cash).abs() <= tol);

        let scaled: Vec<f64> = xs.iter().map(|x| x * scale).collect();
        let dsc = EmpiricalDistribution::from_sample(&scaled).unwrap();
        let r_scale = expectile_empirical(&dsc, al, DEFAULT_TOL).unwrap().value;
        let tol = 2.0 * DEFAULT_TOL * (1.0 + scale * base.abs());
        prop_assert!((r_scale - scale * base).abs() <= tol);
    }

    #[test]
    fn denominator_stays_in_band(xs in sample_strategy(), a in alpha_strategy()) {
        let al = AlphaLevel::new(a).unwrap();
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        let e = expectile_empirical(&d, al, DEFAULT_TOL).unwrap();
        let lo = a.min(1.0 - a);
        let hi = a.max(1.0 - a);
        prop_assert!(e.denominator > 0.0);
        prop_assert!(e.denominator >= lo - 1e-12 && e.denominator <= hi + 1e-12);
    }

    #[test]
    fn avar_dominates_var(xs in sample_strategy(), a in alpha_strategy()) {
        let al = AlphaLevel::new(a).unwrap();
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        prop_assert!(avar(&d, al) >= var_quantile(&d, al) - 1e-10);
    }

    #[test]
    fn weight_mass_is_conserved(seed in 0u64..1000, n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = efron_weights(n, &mut rng);
        prop_assert_eq!(w.iter().sum::<f64>(), n as f64);
        let w = bayesian_weights(n, WeightLaw::default(), &mut rng).unwrap();
        prop_assert!((w.iter().sum::<f64>() - n as f64).abs() <= 1e-9 * n as f64);
        prop_assert!(w.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn circular_weight_mass(seed in 0u64..1000, k in 1usize..12, l in 1usize..12) {
        let n = k.max(2) * l; // any multiple works as long as l < n
        prop_assume!(l < n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = circular_block_weights(n, l, &mut rng).unwrap();
        prop_assert_eq!(w.iter().sum::<f64>(), n as f64);
        let scheme = BootstrapScheme::CircularBlock { block_length: l };
        prop_assert!(scheme.validate(n).is_ok());
    }

    #[test]
    fn iid_variance_translation_and_scaling(xs in sample_strategy(), a in alpha_strategy(),
                                            shift in -10.0..10.0f64, c in 0.05..5.0f64) {
        prop_assume!(xs.iter().any(|x| *x != xs[0]));
        let al = AlphaLevel::new(a).unwrap();
        let d = EmpiricalDistribution::from_sample(&xs).unwrap();
        let v0 = iid_variance(&d, al).unwrap().s2;

        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let v1 = iid_variance(&EmpiricalDistribution::from_sample(&moved).unwrap(), al)
            .unwrap()
            .s2;
        prop_assert!((v1 - v0).abs() <= 1e-6 * (1.0 + v0));

        let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
        let v2 = iid_variance(&EmpiricalDistribution::from_sample(&scaled).unwrap(), al)
            .unwrap()
            .s2;
        prop_assert!((v2 - c * c * v0).abs() <= 1e-6 * (1.0 + c * c * v0));
    }

    #[test]
    fn qh_derivative_is_additive(mu1 in -2.0..2.0f64, mu2 in -2.0..2.0f64,
                                 a in alpha_strategy(), c in -3.0..3.0f64) {
        let f = DistributionModel::Normal { mu: 0.0, sigma2: 1.0 };
        let g1 = DistributionModel::Normal { mu: mu1, sigma2: 1.21 };
        let g2 = DistributionModel::Normal { mu: mu2, sigma2: 0.81 };
        let al = AlphaLevel::new(a).unwrap();
        let d1 = qh_derivative((&f).into(), &Tangent::difference((&g1).into(), (&f).into()), al).unwrap();
        let d2 = qh_derivative((&f).into(), &Tangent::difference((&g2).into(), (&f).into()), al).unwrap();
        // v = (g1 - f) + c (g2 - f)
        let combo = Tangent::Combination(vec![
            (1.0, (&g1).into()),
            (c, (&g2).into()),
            (-1.0 - c, (&f).into()),
        ]);
        let d = qh_derivative((&f).into(), &combo, al).unwrap();
        prop_assert!((d - (d1 + c * d2)).abs() <= 1e-10 * (1.0 + d.abs()));
    }
}
