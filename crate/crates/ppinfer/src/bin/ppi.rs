//! Command-line front end: one subcommand per estimator family, all thin
//! wrappers over the library. Exit code 0 on success, 1 on validation
//! errors, 2 on numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ppinfer::analysis::run_analysis;
use ppinfer::data::{
    load_index_manifest, load_labeled, load_population, load_unlabeled, ConvexLoss, CsvSchema,
    EstimandKind, EstimandSpec, RiskLoss,
};
use ppinfer::error::{Error, Result};
use ppinfer::estimators::GradientSpec;
use ppinfer::finite_pop::{
    fp_pp_logistic, fp_pp_mean, fp_pp_ols, fp_pp_quantile, fp_risk_min, FinitePopulation,
    FpMethod,
};
use ppinfer::grid::GridSpec;
use ppinfer::nonasymptotic::BudgetSplit;
use ppinfer::odds::odds_ratio_interval;
use ppinfer::pvalue::{pp_p_value, NullSpec};
use ppinfer::riskmin::{discrete_mode_loss, mode_loss, tukey_loss, LossSpec, SplitPlan};
use ppinfer::shift::{
    label_shift_interval_with, pp_convex_covshift, LabelShiftOptions, WeightFunction,
};
use ppinfer::sim::{coverage_sim, emit_report, power_check, Generator, ReportFormat, SimScenario};
use ppinfer::stats::Interval;

#[derive(Parser)]
#[command(
    name = "ppi",
    version,
    about = "Prediction-powered inference: valid confidence intervals and p-values \
             from a small gold-standard sample plus model predictions at scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Labeled CSV with outcome and prediction columns.
    #[arg(long)]
    labeled: PathBuf,
    /// Unlabeled CSV with a prediction column.
    #[arg(long)]
    unlabeled: PathBuf,
    /// Column-name overrides, e.g. `y=label,yhat=pred,x=feat`.
    #[arg(long)]
    schema: Option<String>,
}

impl DataArgs {
    fn schema(&self) -> Result<CsvSchema> {
        match &self.schema {
            Some(s) => CsvSchema::parse(s),
            None => Ok(CsvSchema::default()),
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Error level: the output holds at confidence 1 - alpha.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Rectifier share of the budget for nonasymptotic methods
    /// (default alpha/2).
    #[arg(long)]
    delta: Option<f64>,
    /// Use the finite-sample-valid constructions.
    #[arg(long)]
    nonasymptotic: bool,
    /// Boundedness constant B where a method requires one.
    #[arg(long)]
    bound: Option<f64>,
}

impl BudgetArgs {
    fn estimand(&self, kind: EstimandKind) -> Result<EstimandSpec> {
        let mut spec = EstimandSpec::new(kind, self.alpha)?;
        if self.nonasymptotic || self.delta.is_some() {
            spec = spec.with_delta(self.delta.unwrap_or(self.alpha / 2.0))?;
        }
        if let Some(b) = self.bound {
            spec = spec.with_bound(b)?;
        }
        Ok(spec)
    }

    fn split(&self) -> Result<BudgetSplit> {
        BudgetSplit::new(self.alpha, self.delta.unwrap_or(self.alpha / 2.0))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format: text or csv (simulate also accepts plotdata).
    #[arg(long, default_value = "text")]
    format: String,
    /// Seed for any randomized internals (split plans, shuffles).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Prediction-powered mean interval with baselines.
    Mean {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quantile confidence set.
    Quantile {
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Logistic-regression coefficient set.
    Logistic {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Poisson-regression coefficient set.
    Poisson {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// OLS coefficient interval with sandwich variances.
    Ols {
        /// Coefficient index j*.
        #[arg(long, default_value_t = 0)]
        coordinate: usize,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confidence set for a named convex loss (squared or pinball).
    Convex {
        /// Loss name: squared | pinball.
        #[arg(long)]
        loss: String,
        /// Pinball quantile level.
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// General risk minimization over a bounded loss.
    Riskmin {
        /// Loss name: mode | mode-discrete | tukey.
        #[arg(long)]
        loss: String,
        /// Mode neighborhood width.
        #[arg(long)]
        eta: Option<f64>,
        /// Tukey scale.
        #[arg(long)]
        c: Option<f64>,
        /// Explicit comma-separated parameter set.
        #[arg(long)]
        theta: Option<String>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Covariate-shift-weighted convex estimation (two-group weights on a
    /// binary feature column; both CSVs sampled from the source law).
    Covshift {
        /// Loss name: squared | pinball.
        #[arg(long, default_value = "squared")]
        loss: String,
        #[arg(long)]
        q: Option<f64>,
        /// Feature coordinate holding the binary group indicator.
        #[arg(long, default_value_t = 0)]
        weight_feature: usize,
        /// Radon-Nikodym weight for rows with the feature above 0.5.
        #[arg(long)]
        weight_one: f64,
        /// Weight for the complementary group.
        #[arg(long)]
        weight_zero: f64,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Label-shift interval for a linear functional of class prevalences.
    Labelshift {
        /// Per-class coefficients, e.g. `1,0` for the class-1 share.
        #[arg(long)]
        nu: String,
        /// Use the proof-faithful width (||nu' K^-1||_1 factor and the
        /// wider empirical-distribution radius).
        #[arg(long)]
        proof_faithful: bool,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-population inference from a population CSV and an index
    /// manifest.
    Finitepop {
        #[arg(long)]
        population: PathBuf,
        /// CSV with an `index` column of 0-based labeled rows.
        #[arg(long)]
        indices: PathBuf,
        /// mean | quantile | logistic | ols | riskmin.
        #[arg(long)]
        estimand: String,
        /// clt | wsr.
        #[arg(long, default_value = "clt")]
        method: String,
        #[arg(long)]
        q: Option<f64>,
        /// Outcome bounds for the wsr method.
        #[arg(long)]
        outcome_low: Option<f64>,
        #[arg(long)]
        outcome_high: Option<f64>,
        /// Loss name for riskmin: mode | mode-discrete | tukey.
        #[arg(long)]
        loss: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        schema: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// P-value for a null hypothesis by interval inversion.
    Pvalue {
        /// mean | quantile | logistic | ols.
        #[arg(long)]
        estimand: String,
        /// point:V | le:V | ge:V | set:a,b,c.
        #[arg(long)]
        null: String,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0)]
        coordinate: usize,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Odds-ratio interval from two mean intervals (each at 1 - alpha/2).
    Oddsratio {
        /// Interval for mu0 as `lower,upper`.
        #[arg(long)]
        mu0: String,
        /// Interval for mu1 as `lower,upper`.
        #[arg(long)]
        mu1: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Monte Carlo coverage/width simulation on a synthetic scenario.
    Simulate {
        /// gaussian | bernoulli | covshift | labelshift.
        #[arg(long)]
        generator: String,
        /// mean | quantile.
        #[arg(long, default_value = "mean")]
        estimand: String,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        bias: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        error: f64,
        #[arg(long, default_value_t = 0.8)]
        weight_one: f64,
        #[arg(long, default_value_t = 0.2)]
        weight_zero: f64,
        #[arg(long, default_value_t = 0.5)]
        source_prior: f64,
        #[arg(long, default_value_t = 0.7)]
        target_prior: f64,
        #[arg(long, default_value_t = 0.1)]
        confusion: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        unlabeled_n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        /// text | csv | plotdata.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Binary-outcome power rule: when do predictions help at all?
    Power {
        /// Outcome rate.
        #[arg(long)]
        p: f64,
        /// Model error rate.
        #[arg(long)]
        eta: f64,
    },
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Domain(format!("{what} expects `lower,upper`, got `{s}`")));
    }
    let parse = |p: &str| -> Result<f64> {
        p.trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad number `{p}` in {what}")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad number `{p}` in {what}")))
        })
        .collect()
}

fn convex_loss(name: &str, q: Option<f64>) -> Result<ConvexLoss> {
    match name {
        "squared" => Ok(ConvexLoss::Squared),
        "pinball" => Ok(ConvexLoss::Pinball(
            q.ok_or_else(|| Error::Domain("pinball loss needs --q".into()))?,
        )),
        other => Err(Error::Domain(format!("unknown convex loss `{other}`"))),
    }
}

fn risk_loss(name: &str, eta: Option<f64>, c: Option<f64>) -> Result<RiskLoss> {
    match name {
        "mode" => Ok(RiskLoss::Mode(
            eta.ok_or_else(|| Error::Domain("mode loss needs --eta".into()))?,
        )),
        "mode-discrete" => Ok(RiskLoss::ModeDiscrete),
        "tukey" => Ok(RiskLoss::Tukey(
            c.ok_or_else(|| Error::Domain("tukey loss needs --c".into()))?,
        )),
        other => Err(Error::Domain(format!("unknown risk loss `{other}`"))),
    }
}

fn loss_spec(kind: RiskLoss, theta: &Option<String>) -> Result<LossSpec> {
    let mut spec = match kind {
        RiskLoss::Mode(eta) => mode_loss(eta)?,
        RiskLoss::ModeDiscrete => discrete_mode_loss()?,
        RiskLoss::Tukey(c) => tukey_loss(c)?,
    };
    if let Some(t) = theta {
        spec = spec.with_theta(parse_list(t, "--theta")?)?;
    }
    Ok(spec)
}

fn render_interval(name: &str, iv: &Interval) -> String {
    format!(
        "{name}: [{:.6}, {}] level={:.4}{}\n",
        iv.lower,
        if iv.unbounded_upper { "inf".into() } else { format!("{:.6}", iv.upper) },
        iv.level,
        if iv.degenerate { " (degenerate)" } else { "" }
    )
}

fn analysis_command(
    kind: EstimandKind,
    data: &DataArgs,
    budget: &BudgetArgs,
    output: &OutputArgs,
) -> Result<String> {
    let schema = data.schema()?;
    let labeled = load_labeled(&data.labeled, &schema)?;
    let unlabeled = load_unlabeled(&data.unlabeled, &schema)?;
    let spec = budget.estimand(kind)?;
    let report = run_analysis(&labeled, &unlabeled, &spec, output.seed)?;
    match ReportFormat::parse(&output.format)? {
        ReportFormat::Text => Ok(report.to_text()),
        ReportFormat::Csv => Ok(report.to_csv()),
        ReportFormat::PlotData => Err(Error::Domain(
            "plotdata applies to `simulate`; use text or csv here".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Mean { data, budget, output } => {
            analysis_command(EstimandKind::Mean, &data, &budget, &output)
        }
        Command::Quantile { q, data, budget, output } => {
            analysis_command(EstimandKind::Quantile(q), &data, &budget, &output)
        }
        Command::Logistic { data, budget, output } => {
            analysis_command(EstimandKind::Logistic, &data, &budget, &output)
        }
        Command::Poisson { data, budget, output } => {
            analysis_command(EstimandKind::Poisson, &data, &budget, &output)
        }
        Command::Ols { coordinate, data, budget, output } => {
            analysis_command(EstimandKind::Ols(coordinate), &data, &budget, &output)
        }
        Command::Convex { loss, q, data, budget, output } => analysis_command(
            EstimandKind::Convex(convex_loss(&loss, q)?),
            &data,
            &budget,
            &output,
        ),
        Command::Riskmin { loss, eta, c, theta, data, budget, output } => {
            if theta.is_none() {
                return analysis_command(
                    EstimandKind::Risk(risk_loss(&loss, eta, c)?),
                    &data,
                    &budget,
                    &output,
                );
            }
            // explicit parameter sets bypass the named-loss analysis path
            let schema = data.schema()?;
            let labeled = load_labeled(&data.labeled, &schema)?;
            let unlabeled = load_unlabeled(&data.unlabeled, &schema)?;
            let spec = loss_spec(risk_loss(&loss, eta, c)?, &theta)?;
            let split = budget.split()?;
            let seed = output.seed.unwrap_or(20240801);
            let plan = SplitPlan::seeded(unlabeled.len(), seed)?;
            let res = ppinfer::riskmin::pp_risk_min(&labeled, &unlabeled, &spec, split, &plan)?;
            let mut out = format!(
                "retained {} of {} candidates (level {:.4}, split seed {seed})\n",
                res.retained.len(),
                res.theta.len(),
                res.level
            );
            out.push_str(&format!("imputed argmin: {:.6}\n", res.theta[res.imputed_argmin]));
            out.push_str(&format!("retained: {:?}\n", res.retained_values()));
            Ok(out)
        }
        Command::Covshift {
            loss,
            q,
            weight_feature,
            weight_one,
            weight_zero,
            data,
            budget,
            output: _,
        } => {
            let schema = data.schema()?;
            let labeled = load_labeled(&data.labeled, &schema)?;
            let unlabeled = load_unlabeled(&data.unlabeled, &schema)?;
            let gradient = match convex_loss(&loss, q)? {
                ConvexLoss::Squared => GradientSpec::squared(),
                ConvexLoss::Pinball(q) => GradientSpec::pinball(q)?,
            };
            let weights = WeightFunction::new(move |x: &[f64]| {
                if x.get(weight_feature).copied().unwrap_or(0.0) > 0.5 {
                    weight_one
                } else {
                    weight_zero
                }
            });
            let grid = GridSpec::spanning(unlabeled.predictions(), 1000)?;
            let set =
                pp_convex_covshift(&labeled, &unlabeled, gradient, weights, budget.alpha, &grid)?;
            let mut out = format!(
                "retained {} of {} grid points (level {:.4})\n",
                set.retained.len(),
                set.grid.len(),
                set.level
            );
            match set.hull_1d()? {
                Some((lo, hi)) => out.push_str(&format!("hull: [{lo:.6}, {hi:.6}]\n")),
                None => out.push_str("EMPTY SET: model and data may conflict\n"),
            }
            Ok(out)
        }
        Command::Labelshift { nu, proof_faithful, data, budget, output: _ } => {
            let schema = data.schema()?;
            let labeled = load_labeled(&data.labeled, &schema)?;
            let unlabeled = load_unlabeled(&data.unlabeled, &schema)?;
            let nu = parse_list(&nu, "--nu")?;
            let res = label_shift_interval_with(
                &labeled,
                &unlabeled,
                &nu,
                budget.split()?,
                &LabelShiftOptions { proof_faithful, ..Default::default() },
            )?;
            let mut out = render_interval("interval", &res.interval);
            out.push_str(&format!(
                "confusion_slack: {:.6}\ndkwm_slack: {:.6}\n",
                res.confusion_slack, res.dkwm_slack
            ));
            out.push_str(&format!("q_hat_f: {:?}\nq_hat_y: {:?}\n", res.q_hat_f, res.q_hat_y));
            Ok(out)
        }
        Command::Finitepop {
            population,
            indices,
            estimand,
            method,
            q,
            outcome_low,
            outcome_high,
            loss,
            eta,
            c,
            theta,
            schema,
            budget,
            output,
        } => {
            let schema = match &schema {
                Some(s) => CsvSchema::parse(s)?,
                None => CsvSchema::default(),
            };
            let file = load_population(&population, &schema)?;
            let manifest = load_index_manifest(&indices)?;
            let pop = FinitePopulation::from_file(file, manifest)?;
            let method = match method.as_str() {
                "clt" => FpMethod::Clt,
                "wsr" => FpMethod::Wsr {
                    outcome_low: outcome_low.unwrap_or(0.0),
                    outcome_high: outcome_high.unwrap_or(1.0),
                    shuffle_seed: output.seed.unwrap_or(0),
                },
                other => return Err(Error::Domain(format!("unknown method `{other}`"))),
            };
            let alpha = budget.alpha;
            match estimand.as_str() {
                "mean" => {
                    let iv = fp_pp_mean(&pop, alpha, &method)?;
                    Ok(render_interval("mean", &iv))
                }
                "quantile" => {
                    let q = q.ok_or_else(|| Error::Domain("quantile needs --q".into()))?;
                    let grid = GridSpec::spanning(pop.predictions(), 1000)?;
                    let set = fp_pp_quantile(&pop, q, alpha, &grid, &method)?;
                    match set.hull_1d()? {
                        Some((lo, hi)) => Ok(format!(
                            "quantile hull: [{lo:.6}, {hi:.6}] ({} of {} retained)\n",
                            set.retained.len(),
                            set.grid.len()
                        )),
                        None => Ok("EMPTY SET\n".into()),
                    }
                }
                "logistic" => {
                    if pop.dim() != 1 {
                        return Err(Error::Domain(
                            "the CLI exposes 1-d finite-population logistic fits".into(),
                        ));
                    }
                    let grid = GridSpec::linear(-10.0, 10.0, 801)?;
                    let set = fp_pp_logistic(&pop, alpha, &grid, &method)?;
                    match set.hull_1d()? {
                        Some((lo, hi)) => Ok(format!(
                            "coefficient hull: [{lo:.6}, {hi:.6}] ({} of {} retained)\n",
                            set.retained.len(),
                            set.grid.len()
                        )),
                        None => Ok("EMPTY SET\n".into()),
                    }
                }
                "ols" => {
                    let ivs = fp_pp_ols(&pop, alpha, &method)?;
                    let mut out = String::new();
                    for (j, iv) in ivs.iter().enumerate() {
                        out.push_str(&render_interval(&format!("coefficient {j}"), iv));
                    }
                    Ok(out)
                }
                "riskmin" => {
                    let loss_name =
                        loss.ok_or_else(|| Error::Domain("riskmin needs --loss".into()))?;
                    let spec = loss_spec(risk_loss(&loss_name, eta, c)?, &theta)?;
                    let res = fp_risk_min(&pop, &spec, alpha, &method)?;
                    Ok(format!(
                        "retained {} of {} candidates; imputed argmin {:.6}\nretained: {:?}\n",
                        res.retained.len(),
                        res.theta.len(),
                        res.theta[res.imputed_argmin],
                        res.retained_values()
                    ))
                }
                other => {
                    Err(Error::Domain(format!("unknown finite-population estimand `{other}`")))
                }
            }
        }
        Command::Pvalue { estimand, null, q, coordinate, data, budget, output: _ } => {
            let schema = data.schema()?;
            let labeled = load_labeled(&data.labeled, &schema)?;
            let unlabeled = load_unlabeled(&data.unlabeled, &schema)?;
            let kind = match estimand.as_str() {
                "mean" => EstimandKind::Mean,
                "quantile" => EstimandKind::Quantile(
                    q.ok_or_else(|| Error::Domain("quantile needs --q".into()))?,
                ),
                "logistic" => EstimandKind::Logistic,
                "ols" => EstimandKind::Ols(coordinate),
                other => return Err(Error::Domain(format!("unknown estimand `{other}`"))),
            };
            let spec = EstimandSpec::new(kind, budget.alpha)?;
            let null = parse_null(&null)?;
            let p = pp_p_value(&spec, &labeled, &unlabeled, &null)?;
            Ok(format!("p_value: {:.6}\ntolerance: {:.0e}\n", p.value, p.tolerance.max(1e-15)))
        }
        Command::Oddsratio { mu0, mu1, alpha } => {
            let (l0, u0) = parse_pair(&mu0, "--mu0")?;
            let (l1, u1) = parse_pair(&mu1, "--mu1")?;
            let level = 1.0 - alpha / 2.0;
            let iv0 = Interval::new(l0, u0, level)?;
            let iv1 = Interval::new(l1, u1, level)?;
            let out = odds_ratio_interval(&iv0, &iv1)?;
            Ok(render_interval("odds_ratio", &out))
        }
        Command::Simulate {
            generator,
            estimand,
            q,
            bias,
            noise,
            p,
            error,
            weight_one,
            weight_zero,
            source_prior,
            target_prior,
            confusion,
            n,
            unlabeled_n,
            trials,
            seed,
            budget,
            format,
        } => {
            let generator = match generator.as_str() {
                "gaussian" => Generator::Gaussian { bias, noise },
                "bernoulli" => Generator::Bernoulli { p, error },
                "covshift" => Generator::CovShift { weight_one, weight_zero, bias, noise },
                "labelshift" => Generator::LabelShift { source_prior, target_prior, confusion },
                other => return Err(Error::Domain(format!("unknown generator `{other}`"))),
            };
            let kind = match estimand.as_str() {
                "mean" => EstimandKind::Mean,
                "quantile" => EstimandKind::Quantile(
                    q.ok_or_else(|| Error::Domain("quantile needs --q".into()))?,
                ),
                other => return Err(Error::Domain(format!("unknown estimand `{other}`"))),
            };
            let scenario = SimScenario {
                generator,
                n,
                big_n: unlabeled_n,
                trials,
                seed,
                estimand: budget.estimand(kind)?,
            };
            let report = coverage_sim(&scenario)?;
            let bytes = emit_report(&report, ReportFormat::parse(&format)?);
            Ok(String::from_utf8(bytes).expect("reports are utf-8"))
        }
        Command::Power { p, eta } => {
            let check = power_check(p, eta)?;
            Ok(format!(
                "pp_beats_classical: {}\nthreshold: {:.6}\n",
                check.pp_beats_classical, check.threshold
            ))
        }
    }
}

fn parse_null(s: &str) -> Result<NullSpec> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| Error::Domain(format!("null spec `{s}` must look like point:0.5")))?;
    let scalar = |v: &str| -> Result<f64> {
        v.trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad null value `{v}`")))
    };
    match kind {
        "point" => Ok(NullSpec::Point(scalar(value)?)),
        "le" => Ok(NullSpec::LessEq(scalar(value)?)),
        "ge" => Ok(NullSpec::GreaterEq(scalar(value)?)),
        "set" => Ok(NullSpec::Finite(parse_list(value, "null set")?)),
        other => Err(Error::Domain(format!("unknown null kind `{other}`"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
