//! Subcommand implementations: translate parsed flags into library calls
//! and assemble deterministic JSON results.

use serde::Serialize;
use serde_json::{json, Value};

use expectile_core::asymptotics::{default_max_lag, iid_variance, longrun_variance, LagKernel};
use expectile_core::bootstrap::{
    bootstrap_distribution, ci_from_bootstrap, default_block_length, ks_distance, BootstrapScheme,
    CiKind,
};
use expectile_core::mc::{
    comparison_table, consistency_experiment, coverage_experiment, normality_experiment,
    robustness_experiment, CoverageMethod, DataGenerator, ExperimentReport, Standardizer,
};
use expectile_core::model::std_normal_quantile;
use expectile_core::parametric::{
    delta_method_ci, hill_estimator, lognormal_mle, pareto_mle, ParamEstimate,
};
use expectile_core::risk::{avar, check_axioms, var_quantile};
use expectile_core::{expectile_empirical, AlphaLevel, DistributionModel, EmpiricalDistribution};

use crate::csv::{ingest_csv, ColumnSpec};
use crate::{
    AxiomsArgs, BootstrapArgs, CiKindArg, CliError, Command, CoverageMethodArg, EstimateArgs,
    FamilyArg, FitArgs, GenArg, GenSpec, McCommand, OracleArg, SchemeArg,
};

pub struct CommandOutput {
    pub result: Value,
    pub table: Option<String>,
}

impl CommandOutput {
    fn new(result: Value) -> Self {
        Self {
            result,
            table: None,
        }
    }
    fn with_table(result: Value, table: String) -> Self {
        Self {
            result,
            table: Some(table),
        }
    }
}

pub fn dispatch(cmd: &Command, seed: u64) -> Result<CommandOutput, CliError> {
    match cmd {
        Command::Estimate(args) => estimate(args),
        Command::Bootstrap(args) => bootstrap(args, seed),
        Command::Fit(args) => fit(args),
        Command::Mc(mc) => run_mc(mc, seed),
        Command::Axioms(args) => axioms(args),
    }
}

fn alpha_of(a: f64) -> Result<AlphaLevel, CliError> {
    Ok(AlphaLevel::new(a)?)
}

fn gen_of(spec: &GenSpec) -> Result<DataGenerator, CliError> {
    let g = match spec.gen {
        GenArg::Normal => DataGenerator::IidNormal {
            m: spec.g_m,
            s2: spec.g_s2,
        },
        GenArg::Lognormal => DataGenerator::IidLogNormal {
            m: spec.g_m,
            s2: spec.g_s2,
        },
        GenArg::Pareto => DataGenerator::IidPareto {
            a: spec.g_a,
            c_bar: spec.g_cbar,
        },
        GenArg::Twopoint => DataGenerator::IidTwoPoint {
            p: spec.g_p,
            x0: spec.g_x0,
            x1: spec.g_x1,
        },
        GenArg::Ar1 => DataGenerator::Ar1 {
            phi: spec.g_phi,
            innovation_s2: spec.g_s2,
        },
    };
    g.validate()?;
    Ok(g)
}

fn scheme_of(arg: SchemeArg, block: Option<usize>, n: usize) -> BootstrapScheme {
    match arg {
        SchemeArg::Efron => BootstrapScheme::Efron,
        SchemeArg::Bayes => BootstrapScheme::bayesian_default(),
        SchemeArg::Circular => BootstrapScheme::CircularBlock {
            block_length: block.unwrap_or_else(|| default_block_length(n)),
        },
    }
}

#[derive(Serialize)]
struct IntervalJson {
    lower: f64,
    upper: f64,
}

fn estimate(args: &EstimateArgs) -> Result<CommandOutput, CliError> {
    let data = ingest_csv(&args.input, &ColumnSpec::parse(&args.column))?;
    let n = data.len();
    let dist = EmpiricalDistribution::from_sample(&data)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::validation(format!(
            "--level {} outside (0,1)",
            args.level
        )));
    }
    // an explicit --lag is validated downstream; the default is always legal
    let lag = match args.lag {
        Some(l) => l,
        None => default_max_lag(n).min(n.saturating_sub(1)),
    };
    let z = std_normal_quantile(0.5 * (1.0 + args.level));

    let mut rows = Vec::new();
    let mut table = String::from(
        "alpha,expectile,var,avar,s2_iid,s2_longrun,ci_longrun_lower,ci_longrun_upper\n",
    );
    for &a in &args.alphas {
        let al = alpha_of(a)?;
        let est = expectile_empirical(&dist, al, args.tol)?;
        let v = var_quantile(&dist, al);
        let av = avar(&dist, al);
        let s2_iid = iid_variance(&dist, al)?;
        let s2_lr = longrun_variance(&data, al, lag, LagKernel::Bartlett)?;
        let half_iid = z * (s2_iid.s2 / n as f64).sqrt();
        let half_lr = z * (s2_lr.s2 / n as f64).sqrt();
        table.push_str(&format!(
            "{a},{},{v},{av},{},{},{},{}\n",
            est.value,
            s2_iid.s2,
            s2_lr.s2,
            est.value - half_lr,
            est.value + half_lr
        ));
        rows.push(json!({
            "alpha": a,
            "expectile": est.value,
            "denominator": est.denominator,
            "var": v,
            "avar": av,
            "s2_iid": s2_iid.s2,
            "s2_iid_degenerate": s2_iid.degenerate,
            "s2_longrun": s2_lr.s2,
            "lag": lag,
            "ci_iid": IntervalJson { lower: est.value - half_iid, upper: est.value + half_iid },
            "ci_longrun": IntervalJson { lower: est.value - half_lr, upper: est.value + half_lr },
        }));
    }
    Ok(CommandOutput::with_table(
        json!({ "n": n, "levels": rows }),
        table,
    ))
}

fn bootstrap(args: &BootstrapArgs, seed: u64) -> Result<CommandOutput, CliError> {
    let data = ingest_csv(&args.input, &ColumnSpec::parse(&args.column))?;
    let n = data.len();
    let dist = EmpiricalDistribution::from_sample(&data)?;
    let scheme = scheme_of(args.scheme, args.block, n);
    scheme.validate(n)?;
    let kind = match args.ci_kind {
        CiKindArg::Percentile => CiKind::Percentile,
        CiKindArg::Basic => CiKind::Basic,
    };

    let mut rows = Vec::new();
    let mut table = String::from("alpha,replicate\n");
    for &a in &args.alphas {
        let al = alpha_of(a)?;
        let bd = bootstrap_distribution(&data, al, scheme, args.b_reps, seed)?;
        let ci = ci_from_bootstrap(&bd, args.level, kind)?;
        // the KS diagnostic compares against the normal limit the scheme
        // actually targets: long-run variance for the block scheme, plain
        // plug-in otherwise
        let s2 = match scheme {
            BootstrapScheme::CircularBlock { .. } => {
                longrun_variance(&data, al, default_max_lag(n), LagKernel::Bartlett)?
            }
            _ => iid_variance(&dist, al)?,
        };
        let ks = if s2.s2 > 0.0 {
            Some(ks_distance(&bd.replicates, s2.s2)?)
        } else {
            None
        };
        let mean = bd.replicates.iter().sum::<f64>() / bd.replicates.len() as f64;
        let sd = (bd
            .replicates
            .iter()
            .map(|r| (r - mean) * (r - mean))
            .sum::<f64>()
            / bd.replicates.len() as f64)
            .sqrt();
        for r in &bd.replicates {
            table.push_str(&format!("{a},{r}\n"));
        }
        let mut row = json!({
            "alpha": a,
            "estimate": bd.base_estimate,
            "ci": IntervalJson { lower: ci.lower, upper: ci.upper },
            "level": args.level,
            "replicates_mean": mean,
            "replicates_sd": sd,
            "ks_vs_normal_limit": ks,
            "reference_s2": s2.s2,
            "reference_s2_method": s2.method,
        });
        if args.dump_replicates {
            row["replicates"] = json!(bd.replicates);
        }
        rows.push(row);
    }
    Ok(CommandOutput::with_table(
        json!({ "n": n, "scheme": scheme, "b_reps": args.b_reps, "levels": rows }),
        table,
    ))
}

fn fit(args: &FitArgs) -> Result<CommandOutput, CliError> {
    let data = ingest_csv(&args.input, &ColumnSpec::parse(&args.column))?;
    let n = data.len();
    match args.family {
        FamilyArg::Lognormal => {
            let f = lognormal_mle(&data, args.fallback_m, args.fallback_s2)?;
            let est = ParamEstimate::lognormal(f.params, n)?;
            let alphas = ci_rows(&est, &args.alphas, args.level)?;
            Ok(CommandOutput::new(json!({
                "n": n,
                "family": "lognormal",
                "m": f.params.m,
                "s2": f.params.s2,
                "fallback_used": f.fallback_used,
                "zero_variance_flagged": f.zero_variance,
                "levels": alphas,
            })))
        }
        FamilyArg::Pareto => {
            let fit = match args.hill_k {
                None => pareto_mle(&data, args.cbar, args.fallback_a)?,
                Some(k) => hill_estimator(&data, k, args.cbar, args.fallback_a)?,
            };
            let n_eff = args.hill_k.unwrap_or(n);
            let estimator = if args.hill_k.is_some() { "hill" } else { "mle" };
            let mut out = json!({
                "n": n,
                "n_effective": n_eff,
                "family": "pareto",
                "estimator": estimator,
                "a_hat": fit.a_hat,
                "c_bar": fit.c_bar,
                "fallback_used": fit.fallback_used,
                "outside_domain_flagged": fit.outside_domain,
            });
            if fit.outside_domain {
                out["expectile_refused"] = json!("tail index <= 1: infinite mean, no expectile");
            } else {
                let est = ParamEstimate::pareto(fit.params()?, n_eff)?;
                out["levels"] = json!(ci_rows(&est, &args.alphas, args.level)?);
            }
            Ok(CommandOutput::new(out))
        }
    }
}

fn ci_rows(est: &ParamEstimate, alphas: &[f64], level: f64) -> Result<Vec<Value>, CliError> {
    let mut rows = Vec::new();
    for &a in alphas {
        let al = alpha_of(a)?;
        let (point, lower, upper) = delta_method_ci(est, al, level)?;
        let var = est.expectile_asym_variance(al)?;
        rows.push(json!({
            "alpha": a,
            "expectile": point,
            "asym_variance": var,
            "level": level,
            "ci": IntervalJson { lower, upper },
        }));
    }
    Ok(rows)
}

/// Serializes an experiment report with the timing stripped; runtime is
/// surfaced only in the envelope's metadata.
fn report_value(report: &ExperimentReport) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(report)
        .map_err(|e| CliError::numerical(format!("serialization: {e}")))?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("meta");
    }
    Ok(v)
}

fn run_mc(cmd: &McCommand, seed: u64) -> Result<CommandOutput, CliError> {
    match cmd {
        McCommand::Consistency { gen, alpha, n_grid } => {
            let g = gen_of(gen)?;
            let report = consistency_experiment(&g, alpha_of(*alpha)?, n_grid, seed)?;
            let mut table = String::from("n,abs_error\n");
            if let expectile_core::mc::ExperimentOutcome::Consistency { n_grid, errors, .. } =
                &report.outcome
            {
                for (n, e) in n_grid.iter().zip(errors) {
                    table.push_str(&format!("{n},{e}\n"));
                }
            }
            Ok(CommandOutput::with_table(report_value(&report)?, table))
        }
        McCommand::Normality {
            gen,
            alpha,
            n,
            reps,
            known_s2,
            oracle,
            oracle_n,
            oracle_lag,
        } => {
            let g = gen_of(gen)?;
            let al = alpha_of(*alpha)?;
            let standardizer = match (known_s2, oracle) {
                (Some(s2), None) => Standardizer::Known { s2: *s2 },
                (None, Some(OracleArg::Iid)) => Standardizer::IidOracle {
                    path_len: *oracle_n,
                },
                (None, Some(OracleArg::Longrun)) => Standardizer::LongrunOracle {
                    path_len: *oracle_n,
                    max_lag: oracle_lag.unwrap_or_else(|| default_max_lag(*oracle_n) * 4),
                },
                (None, None) => match g.true_iid_s2(al) {
                    Some(s2) => Standardizer::Known { s2 },
                    None => match g {
                        DataGenerator::Ar1 { .. } => Standardizer::LongrunOracle {
                            path_len: *oracle_n,
                            max_lag: oracle_lag.unwrap_or_else(|| default_max_lag(*oracle_n) * 4),
                        },
                        _ => Standardizer::IidOracle {
                            path_len: *oracle_n,
                        },
                    },
                },
                (Some(_), Some(_)) => {
                    return Err(CliError::validation(
                        "--known-s2 and --oracle are mutually exclusive",
                    ))
                }
            };
            let report = normality_experiment(&g, al, *n, *reps, standardizer, seed)?;
            Ok(CommandOutput::new(report_value(&report)?))
        }
        McCommand::Coverage {
            gen,
            alpha,
            n,
            reps,
            level,
            method,
            block,
            b_reps,
            cbar,
            hill_k,
            fallback_m,
            fallback_s2,
            fallback_a,
        } => {
            let g = gen_of(gen)?;
            let m = match method {
                CoverageMethodArg::Efron => CoverageMethod::Bootstrap {
                    scheme: BootstrapScheme::Efron,
                    b_reps: *b_reps,
                },
                CoverageMethodArg::Bayes => CoverageMethod::Bootstrap {
                    scheme: BootstrapScheme::bayesian_default(),
                    b_reps: *b_reps,
                },
                CoverageMethodArg::Circular => CoverageMethod::Bootstrap {
                    scheme: BootstrapScheme::CircularBlock {
                        block_length: block.unwrap_or_else(|| default_block_length(*n)),
                    },
                    b_reps: *b_reps,
                },
                CoverageMethodArg::DeltaLognormal => CoverageMethod::DeltaLogNormal {
                    fallback_m: *fallback_m,
                    fallback_s2: *fallback_s2,
                },
                CoverageMethodArg::DeltaPareto => CoverageMethod::DeltaPareto {
                    c_bar: *cbar,
                    fallback_a: *fallback_a,
                },
                CoverageMethodArg::DeltaHill => CoverageMethod::DeltaHill {
                    k: hill_k.unwrap_or_else(|| expectile_core::parametric::default_hill_k(*n)),
                    c_bar: *cbar,
                    fallback_a: *fallback_a,
                },
            };
            let report = coverage_experiment(&g, alpha_of(*alpha)?, *n, *reps, m, *level, seed)?;
            Ok(CommandOutput::new(report_value(&report)?))
        }
        McCommand::Robustness {
            gen,
            alpha,
            n,
            reps,
            epsilons,
            outlier_mu,
            outlier_s2,
        } => {
            let g = gen_of(gen)?;
            let marginal = g.marginal_model();
            let mu = outlier_mu.unwrap_or_else(|| {
                let q = marginal.quantile(0.9);
                q + 10.0 * (1.0 + q.abs())
            });
            let outlier = DistributionModel::Normal {
                mu,
                sigma2: *outlier_s2,
            };
            let report =
                robustness_experiment(&g, alpha_of(*alpha)?, &outlier, epsilons, *n, *reps, seed)?;
            let mut table = String::from("eps,expectile_shift,var_alpha_shift,median_shift\n");
            if let expectile_core::mc::ExperimentOutcome::Robustness {
                epsilons,
                expectile_shift,
                var_alpha_shift,
                median_shift,
                ..
            } = &report.outcome
            {
                for i in 0..epsilons.len() {
                    table.push_str(&format!(
                        "{},{},{},{}\n",
                        epsilons[i], expectile_shift[i], var_alpha_shift[i], median_shift[i]
                    ));
                }
            }
            Ok(CommandOutput::with_table(report_value(&report)?, table))
        }
        McCommand::Comparison {
            gen,
            alpha,
            n,
            reps,
            contamination,
        } => {
            let g = gen_of(gen)?;
            let report = comparison_table(&g, alpha_of(*alpha)?, *n, *reps, *contamination, seed)?;
            let mut table =
                String::from("functional,consistency_error,normality_ks,contamination_shift\n");
            if let expectile_core::mc::ExperimentOutcome::Comparison { rows, .. } = &report.outcome
            {
                for r in rows {
                    table.push_str(&format!(
                        "{},{},{},{}\n",
                        r.functional, r.consistency_error, r.normality_ks, r.contamination_shift
                    ));
                }
            }
            Ok(CommandOutput::with_table(report_value(&report)?, table))
        }
    }
}

fn axioms(args: &AxiomsArgs) -> Result<CommandOutput, CliError> {
    let x1 = ingest_csv(&args.input, &ColumnSpec::parse(&args.col1))?;
    let x2 = ingest_csv(&args.input, &ColumnSpec::parse(&args.col2))?;
    let report = check_axioms(&x1, &x2, alpha_of(args.alpha)?, args.cash, args.scale)?;
    let value = serde_json::to_value(report)
        .map_err(|e| CliError::numerical(format!("serialization: {e}")))?;
    Ok(CommandOutput::new(
        json!({ "n": x1.len(), "axioms": value }),
    ))
}
