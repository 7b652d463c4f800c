//! Independent numerical oracles for the analytic formulas: finite
//! differences for every derivative, quadrature for partial moments, and
//! grid minimization for the defining loss.

use expectile_core::asymptotics::{qh_derivative, Tangent};
use expectile_core::model::Distribution;
use expectile_core::parametric::{
    lognormal_asym_variance, lognormal_expectile, lognormal_hadamard_derivative,
    pareto_asym_variance, pareto_expectile, pareto_hadamard_derivative, LogNormalParams,
    ParetoParams,
};
use expectile_core::wasserstein::{wasserstein1, CdfSource};
use expectile_core::{
    expectile_empirical, expectile_model, AlphaLevel, DistributionModel, EmpiricalDistribution,
    Mixture, DEFAULT_TOL,
};

fn alpha(a: f64) -> AlphaLevel {
    AlphaLevel::new(a).unwrap()
}

fn pseudo_sample(n: usize, seed: u64) -> Vec<f64> {
    // deterministic scrambled grid, heavy enough tails to be interesting
    (0..n)
        .map(|i| {
            let u = ((i as u64)
                .wrapping_mul(6364136223846793005)
                .wrapping_add(seed)
                % 100_003) as f64
                / 100_003.0;
            (u - 0.5) * 6.0 + (u * 37.0).sin()
        })
        .collect()
}

#[test]
fn v_objective_derivative_is_minus_two_u_curve() {
    let xs = pseudo_sample(101, 5);
    let d = EmpiricalDistribution::from_sample(&xs).unwrap();
    for a in [0.2, 0.5, 0.85] {
        let al = alpha(a);
        for m in [-1.0, 0.3, 2.0] {
            let h = 1e-6;
            let fd = (d.v_objective(al, m + h) - d.v_objective(al, m - h)) / (2.0 * h);
            let expect = -2.0 * d.u_curve(al, m);
            assert!(
                (fd - expect).abs() < 1e-5 * (1.0 + expect.abs()),
                "alpha {a} m {m}: fd {fd} vs {expect}"
            );
        }
    }
}

#[test]
fn expectile_minimizes_the_asymmetric_loss_on_a_grid() {
    let xs = pseudo_sample(73, 11);
    let d = EmpiricalDistribution::from_sample(&xs).unwrap();
    for a in [0.15, 0.5, 0.8] {
        let al = alpha(a);
        let m = expectile_empirical(&d, al, DEFAULT_TOL).unwrap().value;
        let at_min = d.v_objective(al, m);
        for k in 1..=40 {
            let delta = 0.05 * k as f64;
            assert!(d.v_objective(al, m + delta) >= at_min - 1e-12);
            assert!(d.v_objective(al, m - delta) >= at_min - 1e-12);
        }
    }
}

/// Finite-difference oracle for the functional derivative: the quotient
/// `[R(F + eps v) - R(F)] / eps` must converge to the derivative with error
/// shrinking roughly linearly in eps.
fn qh_fd_ratios(f: DistributionModel, g: DistributionModel, a: f64) -> (f64, Vec<f64>) {
    let al = alpha(a);
    let v = Tangent::difference((&g).into(), (&f).into());
    let deriv = qh_derivative((&f).into(), &v, al).unwrap();
    let r0 = expectile_model(&f, al, 1e-13).unwrap().value;
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let mix = Mixture::new(vec![(1.0 - eps, f), (eps, g)]).unwrap();
            let r_eps = expectile_model(&mix, al, 1e-13).unwrap().value;
            ((r_eps - r0) / eps - deriv).abs()
        })
        .collect();
    (deriv, errs)
}

#[test]
fn qh_derivative_matches_finite_differences() {
    let pairs = [
        (
            DistributionModel::Normal {
                mu: 0.0,
                sigma2: 1.0,
            },
            DistributionModel::Normal {
                mu: 0.1,
                sigma2: 1.0,
            },
            0.7,
        ),
        (
            DistributionModel::Normal {
                mu: 0.0,
                sigma2: 1.0,
            },
            DistributionModel::Normal {
                mu: 0.0,
                sigma2: 1.44,
            },
            0.3,
        ),
        (
            DistributionModel::LogNormal { m: 0.0, s2: 0.49 },
            DistributionModel::LogNormal { m: 0.2, s2: 0.49 },
            0.9,
        ),
        (
            DistributionModel::Pareto { a: 3.0, c_bar: 1.0 },
            DistributionModel::Pareto { a: 3.5, c_bar: 1.0 },
            0.6,
        ),
        // alpha = 1/2 is excluded: there the functional is exactly linear
        // (the mean), the quotient is exact at every eps, and ratios sit on
        // the rounding floor
        (
            DistributionModel::Normal {
                mu: 1.0,
                sigma2: 2.0,
            },
            DistributionModel::LogNormal { m: 0.0, s2: 0.25 },
            0.35,
        ),
    ];
    for (f, g, a) in pairs {
        let (deriv, errs) = qh_fd_ratios(f, g, a);
        assert!(
            deriv.is_finite() && deriv.abs() > 1e-12,
            "degenerate pair {f:?} {g:?}"
        );
        // error must drop by >= 5x per epsilon decade
        assert!(
            errs[0] / errs[1] >= 5.0 && errs[1] / errs[2] >= 5.0,
            "{f:?} -> {g:?} at alpha {a}: errors {errs:?}"
        );
    }
}

#[test]
fn lognormal_hadamard_matches_finite_differences() {
    let p = LogNormalParams::new(0.1, 0.64).unwrap();
    let dirs = [(1.0, 0.0), (0.0, 1.0), (0.7, -0.4)];
    for tau in dirs {
        let mut linf: f64 = 0.0;
        let mut l1 = 0.0;
        let mut l1_grid = 0.0;
        let xs: Vec<f64> = (1..400).map(|i| i as f64 * 0.025).collect();
        for &x in &xs {
            let eps = 1e-6;
            let f_plus = DistributionModel::LogNormal {
                m: p.m + eps * tau.0,
                s2: p.s2 + eps * tau.1,
            };
            let f_minus = DistributionModel::LogNormal {
                m: p.m - eps * tau.0,
                s2: p.s2 - eps * tau.1,
            };
            let fd = (f_plus.cdf(x) - f_minus.cdf(x)) / (2.0 * eps);
            let an = lognormal_hadamard_derivative(&p, tau, x);
            linf = linf.max((fd - an).abs());
            l1 += (fd - an).abs() * 0.025;
            l1_grid += an.abs() * 0.025;
        }
        assert!(linf < 1e-6, "tau {tau:?}: sup error {linf}");
        assert!(l1 < 1e-6 * (1.0 + l1_grid), "tau {tau:?}: L1 error {l1}");
    }
}

#[test]
fn pareto_hadamard_matches_finite_differences() {
    let p = ParetoParams::new(2.5, 1.5).unwrap();
    for y in [1.0, -0.3] {
        for x in [1.6, 2.0, 4.0, 20.0] {
            let eps = 1e-6;
            let up = DistributionModel::Pareto {
                a: p.a + eps * y,
                c_bar: p.c_bar,
            };
            let dn = DistributionModel::Pareto {
                a: p.a - eps * y,
                c_bar: p.c_bar,
            };
            let fd = (up.cdf(x) - dn.cdf(x)) / (2.0 * eps);
            let an = pareto_hadamard_derivative(&p, y, x);
            assert!((fd - an).abs() < 1e-7, "y {y} x {x}: fd {fd} vs {an}");
        }
    }
}

/// Numerical delta method: the derivative chain evaluated by quadrature
/// instead of the closed-form integrals; linearity in the tangent reduces
/// the variance of the image of the MLE limit law to the two coordinate
/// derivatives.
#[test]
fn lognormal_variance_cross_checked_by_numerical_delta_method() {
    let p = LogNormalParams::new(0.0, 0.25).unwrap();
    let model = p.model();
    for a in [0.5, 0.8, 0.9] {
        let al = alpha(a);
        let c1 = qh_derivative(
            (&model).into(),
            &Tangent::Function(Box::new(move |x| {
                lognormal_hadamard_derivative(&p, (1.0, 0.0), x)
            })),
            al,
        )
        .unwrap();
        let c2 = qh_derivative(
            (&model).into(),
            &Tangent::Function(Box::new(move |x| {
                lognormal_hadamard_derivative(&p, (0.0, 1.0), x)
            })),
            al,
        )
        .unwrap();
        let numeric = c1 * c1 * p.s2 + c2 * c2 * 2.0 * p.s2 * p.s2;
        let closed = lognormal_asym_variance(&p, al).unwrap();
        assert!(
            (numeric - closed).abs() <= 0.005 * closed,
            "alpha {a}: numeric {numeric} closed {closed}"
        );
    }
}

#[test]
fn pareto_variance_cross_checked_by_numerical_delta_method() {
    let p = ParetoParams::new(3.0, 1.0).unwrap();
    let model = p.model();
    for a in [0.5, 0.75, 0.9] {
        let al = alpha(a);
        let c = qh_derivative(
            (&model).into(),
            &Tangent::Function(Box::new(move |x| pareto_hadamard_derivative(&p, 1.0, x))),
            al,
        )
        .unwrap();
        let numeric = c * c * p.a * p.a;
        let closed = pareto_asym_variance(&p, al).unwrap();
        assert!(
            (numeric - closed).abs() <= 0.005 * closed,
            "alpha {a}: numeric {numeric} closed {closed}"
        );
    }
}

#[test]
fn parametric_expectile_agrees_with_quadrature_upm_route() {
    // closed-form partial moments vs a model solved through tail quadrature
    struct QuadUpm(DistributionModel);
    impl Distribution for QuadUpm {
        fn cdf(&self, x: f64) -> f64 {
            self.0.cdf(x)
        }
        fn mean(&self) -> f64 {
            self.0.mean()
        }
        fn upper_partial_moment(&self, t: f64) -> f64 {
            expectile_core::quad::integrate_upper_tail(&|x| 1.0 - self.0.cdf(x), t, 1e-12)
                .expect("integrable tail")
        }
    }
    let p = ParetoParams::new(3.0, 1.0).unwrap();
    let al = alpha(0.9);
    let closed = pareto_expectile(&p, al, 1e-12).unwrap().value;
    let quad = expectile_model(&QuadUpm(p.model()), al, 1e-10)
        .unwrap()
        .value;
    assert!(
        (closed - quad).abs() < 1e-8 * (1.0 + closed.abs()),
        "{closed} vs {quad}"
    );

    let ln = LogNormalParams::new(0.0, 1.0).unwrap();
    let closed = lognormal_expectile(&ln, alpha(0.5), 1e-12).unwrap().value;
    assert!((closed - (0.5f64).exp()).abs() < 1e-9);
}

#[test]
fn wasserstein_continuity_trend_on_nested_subsamples() {
    // |R(F_n) - R(F_N)| shrinks together with W1(F_n, F_N)
    let full = pseudo_sample(4096, 23);
    let big = EmpiricalDistribution::from_sample(&full).unwrap();
    let al = alpha(0.8);
    let target = expectile_empirical(&big, al, DEFAULT_TOL).unwrap().value;
    let mut last_w = f64::INFINITY;
    let mut first_err = None;
    let mut final_err = None;
    for n in [64usize, 256, 1024, 4096] {
        let sub = EmpiricalDistribution::from_sample(&full[..n]).unwrap();
        let w = wasserstein1(CdfSource::Empirical(&sub), CdfSource::Empirical(&big));
        let err = (expectile_empirical(&sub, al, DEFAULT_TOL).unwrap().value - target).abs();
        assert!(w <= last_w + 1e-12, "W1 must shrink along nested prefixes");
        last_w = w;
        first_err.get_or_insert(err);
        final_err = Some(err);
    }
    assert!(final_err.unwrap() <= first_err.unwrap());
    assert!(final_err.unwrap() < 1e-12, "n = N term is exactly zero");
}

/// The delta-method coefficients are plain parameter derivatives of the
/// fitted expectile; central differences of the solved expectile check them
/// without any functional-derivative machinery.
#[test]
fn lognormal_coefficients_match_parameter_finite_differences() {
    use expectile_core::parametric::{lognormal_derivative_coefficients, PsiConvention};
    let p = LogNormalParams::new(0.3, 0.36).unwrap();
    for a in [0.25, 0.6, 0.9] {
        let al = alpha(a);
        let (c1, c2) = lognormal_derivative_coefficients(&p, al, PsiConvention::DivideByS).unwrap();
        let eps = 1e-6;
        let r = |m: f64, s2: f64| {
            lognormal_expectile(&LogNormalParams::new(m, s2).unwrap(), al, 1e-13)
                .unwrap()
                .value
        };
        let fd_m = (r(p.m + eps, p.s2) - r(p.m - eps, p.s2)) / (2.0 * eps);
        let fd_s2 = (r(p.m, p.s2 + eps) - r(p.m, p.s2 - eps)) / (2.0 * eps);
        assert!(
            (fd_m - c1).abs() <= 1e-5 * (1.0 + c1.abs()),
            "alpha {a}: dR/dm {fd_m} vs {c1}"
        );
        assert!(
            (fd_s2 - c2).abs() <= 1e-5 * (1.0 + c2.abs()),
            "alpha {a}: dR/ds2 {fd_s2} vs {c2}"
        );
    }
}

#[test]
fn pareto_variance_matches_parameter_finite_difference() {
    let p = ParetoParams::new(2.8, 1.4).unwrap();
    for a in [0.3, 0.7, 0.95] {
        let al = alpha(a);
        let eps = 1e-6;
        let r = |ai: f64| {
            pareto_expectile(&ParetoParams::new(ai, p.c_bar).unwrap(), al, 1e-13)
                .unwrap()
                .value
        };
        let fd = (r(p.a + eps) - r(p.a - eps)) / (2.0 * eps);
        let var = pareto_asym_variance(&p, al).unwrap();
        let expect = fd * fd * p.a * p.a;
        assert!(
            (var - expect).abs() <= 1e-4 * (1.0 + expect),
            "alpha {a}: closed {var} vs fd-implied {expect}"
        );
    }
}
