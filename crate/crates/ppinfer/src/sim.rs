//! Synthetic scenarios, Monte Carlo coverage measurement, power
//! diagnostics, and report emission.
//!
//! Determinism contract: a scenario is a pure function of (generator,
//! sizes, seed). Every trial derives its own RNG stream from the master
//! seed and the trial index, and aggregation is order-independent, so
//! reports are byte-identical across runs and worker counts. Wall time is
//! reported only in the text format for that reason.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{EstimandKind, EstimandSpec, LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::estimators::{pp_mean, pp_quantile, GradientSpec};
use crate::grid::GridSpec;
use crate::nonasymptotic::{pp_mean_na, BudgetSplit};
use crate::shift::{label_shift_interval, pp_convex_covshift, WeightFunction};
use crate::stats::{clt_mean_interval, normal_quantile, Interval};

/// Synthetic data-generating process for one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Y ~ N(0, 1), f = Y + bias + noise * eps.
    Gaussian { bias: f64, noise: f64 },
    /// Y ~ Bern(p), f = Y flipped with probability `error`.
    Bernoulli { p: f64, error: f64 },
    /// Binary group feature drawn with probability 1/2 in both samples;
    /// the weight pair defines the covariate-shifted target law, which
    /// places mass weight_one : weight_zero on the groups. Outcomes are
    /// N(+1, 1) in group 1 and N(-1, 1) in group 0; predictions add
    /// bias + noise * eps. The estimand is the target-law mean.
    CovShift { weight_one: f64, weight_zero: f64, bias: f64, noise: f64 },
    /// Two classes with prior `source_prior` on class 1 in the labeled data
    /// and `target_prior` in the unlabeled data; predictions flip classes
    /// with probability `confusion`.
    LabelShift { source_prior: f64, target_prior: f64, confusion: f64 },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Gaussian { bias, noise } => write!(f, "gaussian(bias={bias},noise={noise})"),
            Generator::Bernoulli { p, error } => write!(f, "bernoulli(p={p},error={error})"),
            Generator::CovShift { weight_one, weight_zero, bias, noise } => write!(
                f,
                "covshift(w1={weight_one},w0={weight_zero},bias={bias},noise={noise})"
            ),
            Generator::LabelShift { source_prior, target_prior, confusion } => write!(
                f,
                "labelshift(source={source_prior},target={target_prior},confusion={confusion})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub generator: Generator,
    pub n: usize,
    pub big_n: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimand: EstimandSpec,
}

/// One method's interval (or set hull) in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    /// Hull endpoints; None for an empty set.
    pub hull: Option<(f64, f64)>,
    pub covered: bool,
}

impl TrialRecord {
    fn from_interval(iv: &Interval, truth: f64) -> Self {
        TrialRecord { hull: Some((iv.lower, iv.upper)), covered: iv.contains(truth) }
    }

    fn from_hull(hull: Option<(f64, f64)>, truth: f64) -> Self {
        let covered = hull.map(|(lo, hi)| lo <= truth && truth <= hi).unwrap_or(false);
        TrialRecord { hull, covered }
    }

    pub fn width(&self) -> f64 {
        self.hull.map(|(lo, hi)| hi - lo).unwrap_or(0.0)
    }
}

pub const METHOD_NAMES: [&str; 3] = ["pp", "classical", "imputation"];

/// Aggregated tally for one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodTally {
    pub hits: usize,
    pub misses: usize,
    pub mean_width: f64,
    /// Width quartiles (25%, 50%, 75%) by nearest rank.
    pub width_quartiles: [f64; 3],
}

/// Monte Carlo coverage/width tally for the three methods.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub scenario: SimScenario,
    pub truth: f64,
    /// Per-method trial records, indexed like [`METHOD_NAMES`].
    pub records: [Vec<TrialRecord>; 3],
    pub wall_time: Duration,
}

impl CoverageReport {
    pub fn tally(&self, method: usize) -> MethodTally {
        let recs = &self.records[method];
        let hits = recs.iter().filter(|r| r.covered).count();
        let mut widths: Vec<f64> = recs.iter().map(|r| r.width()).collect();
        widths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let quart = |q: f64| -> f64 {
            if widths.is_empty() {
                return 0.0;
            }
            widths[((widths.len() - 1) as f64 * q).round() as usize]
        };
        MethodTally {
            hits,
            misses: recs.len() - hits,
            mean_width: if widths.is_empty() {
                0.0
            } else {
                widths.iter().sum::<f64>() / widths.len() as f64
            },
            width_quartiles: [quart(0.25), quart(0.5), quart(0.75)],
        }
    }

    pub fn coverage(&self, method: usize) -> f64 {
        let t = self.tally(method);
        t.hits as f64 / (t.hits + t.misses).max(1) as f64
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on the ChaCha stream keeps trials reproducible without
    // pulling in a distributions crate.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Analytic ground truth of the scenario's estimand.
pub fn scenario_truth(scenario: &SimScenario) -> Result<f64> {
    match (&scenario.generator, &scenario.estimand.kind) {
        (Generator::Gaussian { .. }, EstimandKind::Mean) => Ok(0.0),
        (Generator::Gaussian { .. }, EstimandKind::Quantile(q)) => normal_quantile(*q),
        (Generator::Bernoulli { p, .. }, EstimandKind::Mean) => Ok(*p),
        (Generator::CovShift { weight_one, weight_zero, .. }, EstimandKind::Mean) => {
            let q1 = weight_one / (weight_one + weight_zero);
            Ok(q1 * 1.0 + (1.0 - q1) * (-1.0))
        }
        (Generator::LabelShift { target_prior, .. }, EstimandKind::Mean) => Ok(*target_prior),
        (g, k) => Err(Error::domain(format!(
            "unsupported scenario: generator {g} with estimand {k}"
        ))),
    }
}

/// Retention band of the one-sample estimating equation |mean g| <= z sd /
/// sqrt(n), the classical/imputation baseline for gridded estimands.
fn cdf_band_hull(values: &[f64], q: f64, alpha: f64) -> Result<Option<(f64, f64)>> {
    let grid = GridSpec::spanning(values, 400)?;
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let n = values.len() as f64;
    let axis = &grid.axes[0];
    let mut hull: Option<(f64, f64)> = None;
    for idx in 0..axis.resolution {
        let theta = axis.point(idx);
        let cdf = values.iter().filter(|&&v| v <= theta).count() as f64 / n;
        let w = z * (cdf * (1.0 - cdf) / n).sqrt();
        if (cdf - q).abs() <= w {
            hull = Some(match hull {
                None => (theta, theta),
                Some((lo, _)) => (lo, theta),
            });
        }
    }
    Ok(hull)
}

fn run_trial(scenario: &SimScenario, truth: f64, trial: usize) -> Result<[TrialRecord; 3]> {
    let mut rng = trial_rng(scenario.seed, trial);
    let alpha = scenario.estimand.alpha;
    let (n, big_n) = (scenario.n, scenario.big_n);

    match (&scenario.generator, &scenario.estimand.kind) {
        (Generator::Gaussian { bias, noise }, kind) => {
            let mut y = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                let yi = standard_normal(&mut rng);
                y.push(yi);
                f.push(yi + bias + noise * standard_normal(&mut rng));
            }
            let mut fu = Vec::with_capacity(big_n);
            for _ in 0..big_n {
                let yi = standard_normal(&mut rng);
                fu.push(yi + bias + noise * standard_normal(&mut rng));
            }
            let labeled = LabeledSet::from_pairs(y.clone(), f)?;
            let unlabeled = UnlabeledSet::from_predictions(fu.clone())?;
            match kind {
                EstimandKind::Mean => {
                    if scenario.estimand.delta.is_some() {
                        return Err(Error::domain(
                            "the gaussian generator is unbounded; nonasymptotic \
                             intervals need the bernoulli generator",
                        ));
                    }
                    let pp = pp_mean(&labeled, &unlabeled, alpha)?;
                    let classical = clt_mean_interval(&y, alpha)?;
                    let imputation = clt_mean_interval(&fu, alpha)?;
                    Ok([
                        TrialRecord::from_interval(&pp, truth),
                        TrialRecord::from_interval(&classical, truth),
                        TrialRecord::from_interval(&imputation, truth),
                    ])
                }
                EstimandKind::Quantile(q) => {
                    let grid = GridSpec::spanning(unlabeled.predictions(), 1000)?;
                    let pp = pp_quantile(&labeled, &unlabeled, *q, alpha, &grid)?;
                    let pp_rec = TrialRecord::from_hull(pp.hull_1d()?, truth);
                    let classical = cdf_band_hull(&y, *q, alpha)?;
                    let imputation = cdf_band_hull(&fu, *q, alpha)?;
                    Ok([
                        pp_rec,
                        TrialRecord::from_hull(classical, truth),
                        TrialRecord::from_hull(imputation, truth),
                    ])
                }
                other => Err(Error::domain(format!(
                    "gaussian generator supports mean and quantile, got {other}"
                ))),
            }
        }
        (Generator::Bernoulli { p, error }, EstimandKind::Mean) => {
            let flip = |v: f64, rng: &mut ChaCha8Rng| {
                if rng.gen::<f64>() < *error {
                    1.0 - v
                } else {
                    v
                }
            };
            let mut y = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                let yi = (rng.gen::<f64>() < *p) as i32 as f64;
                y.push(yi);
                let fi = flip(yi, &mut rng);
                f.push(fi);
            }
            let mut fu = Vec::with_capacity(big_n);
            for _ in 0..big_n {
                let yi = (rng.gen::<f64>() < *p) as i32 as f64;
                fu.push(flip(yi, &mut rng));
            }
            let labeled = LabeledSet::from_pairs(y.clone(), f)?;
            let unlabeled = UnlabeledSet::from_predictions(fu.clone())?;
            let pp = match scenario.estimand.delta {
                Some(delta) => pp_mean_na(
                    &labeled,
                    &unlabeled,
                    BudgetSplit::new(alpha, delta)?,
                    scenario.estimand.bound.unwrap_or(1.0),
                )?,
                None => pp_mean(&labeled, &unlabeled, alpha)?,
            };
            let classical = clt_mean_interval(&y, alpha)?;
            let imputation = clt_mean_interval(&fu, alpha)?;
            Ok([
                TrialRecord::from_interval(&pp, truth),
                TrialRecord::from_interval(&classical, truth),
                TrialRecord::from_interval(&imputation, truth),
            ])
        }
        (Generator::CovShift { weight_one, weight_zero, bias, noise }, EstimandKind::Mean) => {
            // both samples come from the source law (groups equally
            // likely); the weights w(x) = dQ/dP encode the target law that
            // defines the estimand
            let q1 = weight_one / (weight_one + weight_zero);
            let gen_row = |group1: bool, rng: &mut ChaCha8Rng| -> (f64, f64, f64) {
                let m = if group1 { 1.0 } else { -1.0 };
                let yv = m + standard_normal(rng);
                let fv = yv + bias + noise * standard_normal(rng);
                (if group1 { 1.0 } else { 0.0 }, yv, fv)
            };
            let mut xl = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                let (x, yv, fv) = gen_row(rng.gen::<f64>() < 0.5, &mut rng);
                xl.push(vec![x]);
                y.push(yv);
                f.push(fv);
            }
            let mut xu = Vec::with_capacity(big_n);
            let mut fu = Vec::with_capacity(big_n);
            for _ in 0..big_n {
                let (x, _yv, fv) = gen_row(rng.gen::<f64>() < 0.5, &mut rng);
                xu.push(vec![x]);
                fu.push(fv);
            }
            let labeled = LabeledSet::new(Some(xl.clone()), y.clone(), f)?;
            let unlabeled = UnlabeledSet::new(Some(xu), fu.clone())?;

            let w1 = q1 / 0.5;
            let w0 = (1.0 - q1) / 0.5;
            let weight =
                WeightFunction::new(move |x: &[f64]| if x[0] > 0.5 { w1 } else { w0 });
            let span = 4.0;
            let grid = GridSpec::linear(truth - span, truth + span, 801)?;
            let set = pp_convex_covshift(
                &labeled,
                &unlabeled,
                GradientSpec::squared(),
                weight,
                alpha,
                &grid,
            )?;
            let pp_rec = TrialRecord::from_hull(set.hull_1d()?, truth);

            // classical: weighted estimating equation on labeled data only
            let z = normal_quantile(1.0 - alpha / 2.0)?;
            let mut hull: Option<(f64, f64)> = None;
            let weights: Vec<f64> =
                xl.iter().map(|x| if x[0] > 0.5 { w1 } else { w0 }).collect();
            for idx in 0..grid.len() {
                let theta = grid.axes[0].point(idx);
                let vals: Vec<f64> =
                    weights.iter().zip(&y).map(|(&w, &yv)| w * (theta - yv)).collect();
                let mean = vals.iter().sum::<f64>() / n as f64;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                if mean.abs() <= z * (var / n as f64).sqrt() {
                    hull = Some(match hull {
                        None => (theta, theta),
                        Some((lo, _)) => (lo, theta),
                    });
                }
            }
            let classical = TrialRecord::from_hull(hull, truth);
            let imputation =
                TrialRecord::from_interval(&clt_mean_interval(&fu, alpha)?, truth);
            Ok([pp_rec, classical, imputation])
        }
        (
            Generator::LabelShift { source_prior, target_prior, confusion },
            EstimandKind::Mean,
        ) => {
            let draw = |prior: f64, rng: &mut ChaCha8Rng| -> (f64, f64) {
                let yv = if rng.gen::<f64>() < prior { 1.0 } else { 2.0 };
                let fv = if rng.gen::<f64>() < *confusion { 3.0 - yv } else { yv };
                (yv, fv)
            };
            let mut y = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                let (yv, fv) = draw(*source_prior, &mut rng);
                y.push(yv);
                f.push(fv);
            }
            let mut fu = Vec::with_capacity(big_n);
            for _ in 0..big_n {
                fu.push(draw(*target_prior, &mut rng).1);
            }
            let labeled = LabeledSet::from_pairs(y.clone(), f)?;
            let unlabeled = UnlabeledSet::from_predictions(fu.clone())?;
            let delta = scenario.estimand.delta.unwrap_or(alpha / 2.0);
            let result = label_shift_interval(
                &labeled,
                &unlabeled,
                &[1.0, 0.0],
                BudgetSplit::new(alpha, delta)?,
            )?;
            let pp_rec = TrialRecord::from_interval(&result.interval, truth);
            let ones: Vec<f64> = y.iter().map(|&v| (v == 1.0) as i32 as f64).collect();
            let classical = clt_mean_interval(&ones, alpha)?;
            let pred_ones: Vec<f64> = fu.iter().map(|&v| (v == 1.0) as i32 as f64).collect();
            let imputation = clt_mean_interval(&pred_ones, alpha)?;
            Ok([
                pp_rec,
                TrialRecord::from_interval(&classical, truth),
                TrialRecord::from_interval(&imputation, truth),
            ])
        }
        (g, k) => Err(Error::domain(format!(
            "unsupported scenario: generator {g} with estimand {k}"
        ))),
    }
}

/// Run the scenario's trials (in parallel, deterministically) and tally
/// containment of the analytic ground truth.
pub fn coverage_sim(scenario: &SimScenario) -> Result<CoverageReport> {
    if scenario.trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let truth = scenario_truth(scenario)?;
    let start = Instant::now();
    let per_trial: Vec<[TrialRecord; 3]> = (0..scenario.trials)
        .into_par_iter()
        .map(|t| run_trial(scenario, truth, t))
        .collect::<Result<_>>()?;
    let mut records: [Vec<TrialRecord>; 3] =
        [Vec::new(), Vec::new(), Vec::new()];
    for rec in per_trial {
        for (m, r) in rec.into_iter().enumerate() {
            records[m].push(r);
        }
    }
    Ok(CoverageReport {
        scenario: scenario.clone(),
        truth,
        records,
        wall_time: start.elapsed(),
    })
}

// --- power diagnostics -----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCheck {
    pub pp_beats_classical: bool,
    /// Largest model error below which prediction-powered intervals beat
    /// classical ones in the N >> n limit.
    pub threshold: f64,
}

/// Binary-outcome power rule: with Y ~ Bern(p) and symmetric model error
/// eta, prediction-powered intervals win exactly when
/// Var(f - Y) = eta - eta^2 (1 - 2p)^2 is below Var(Y) = p(1 - p). The
/// threshold is the smaller root in eta.
pub fn power_check(p: f64, eta: f64) -> Result<PowerCheck> {
    for (name, v) in [("p", p), ("eta", eta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::domain(format!("{name} = {v} outside (0, 1)")));
        }
    }
    let a = (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
    let c = p * (1.0 - p);
    let threshold = if a < 1e-12 {
        c
    } else {
        (1.0 - (1.0 - 4.0 * a * c).sqrt()) / (2.0 * a)
    };
    let var_err = eta - eta * eta * a;
    Ok(PowerCheck { pp_beats_classical: var_err < c, threshold })
}

// --- report emission ---------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    PlotData,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "plotdata" => Ok(ReportFormat::PlotData),
            other => Err(Error::domain(format!(
                "unknown format `{other}` (expected text, csv, or plotdata)"
            ))),
        }
    }
}

/// Serialize a coverage report. The csv and plotdata formats are
/// deterministic for a fixed scenario and seed; wall time appears only in
/// the text format.
pub fn emit_report(report: &CoverageReport, format: ReportFormat) -> Vec<u8> {
    let mut out = String::new();
    let s = &report.scenario;
    match format {
        ReportFormat::Text => {
            out.push_str(&format!(
                "scenario: {} estimand={} n={} N={} trials={} seed={}\n",
                s.generator, s.estimand.kind, s.n, s.big_n, s.trials, s.seed
            ));
            out.push_str(&format!("truth: {:.6}\n", report.truth));
            out.push_str("method      coverage  mean_width  q25       q50       q75\n");
            for (m, name) in METHOD_NAMES.iter().enumerate() {
                let t = report.tally(m);
                out.push_str(&format!(
                    "{name:<11} {:<9.4} {:<11.6} {:<9.6} {:<9.6} {:<9.6}\n",
                    report.coverage(m),
                    t.mean_width,
                    t.width_quartiles[0],
                    t.width_quartiles[1],
                    t.width_quartiles[2]
                ));
            }
            out.push_str(&format!("wall_time_ms: {}\n", report.wall_time.as_millis()));
        }
        ReportFormat::Csv => {
            out.push_str(
                "method,estimand,n,N,trials,hits,misses,coverage,mean_width,width_q25,width_q50,width_q75\n",
            );
            for (m, name) in METHOD_NAMES.iter().enumerate() {
                let t = report.tally(m);
                out.push_str(&format!(
                    "{name},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                    s.estimand.kind,
                    s.n,
                    s.big_n,
                    s.trials,
                    t.hits,
                    t.misses,
                    report.coverage(m),
                    t.mean_width,
                    t.width_quartiles[0],
                    t.width_quartiles[1],
                    t.width_quartiles[2]
                ));
            }
        }
        ReportFormat::PlotData => {
            out.push_str("method,estimand,n,N,trial,lower,upper,width,covered\n");
            for trial in 0..s.trials {
                for (m, name) in METHOD_NAMES.iter().enumerate() {
                    let r = &report.records[m][trial];
                    let (lo, hi) = match r.hull {
                        Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
                        None => (String::new(), String::new()),
                    };
                    out.push_str(&format!(
                        "{name},{},{},{},{trial},{lo},{hi},{:.6},{}\n",
                        s.estimand.kind,
                        s.n,
                        s.big_n,
                        r.width(),
                        r.covered as i32
                    ));
                }
            }
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_scenario(generator: Generator, n: usize, big_n: usize, trials: usize) -> SimScenario {
        SimScenario {
            generator,
            n,
            big_n,
            trials,
            seed: 20240817,
            estimand: EstimandSpec::new(EstimandKind::Mean, 0.1).unwrap(),
        }
    }

    #[test]
    fn power_check_paper_thresholds() {
        let t = power_check(0.5, 0.1).unwrap();
        assert_eq!(t.threshold, 0.25);
        assert!(t.pp_beats_classical);
        let t = power_check(0.1, 0.2).unwrap();
        assert!((t.threshold - 0.0959).abs() < 0.0005, "{}", t.threshold);
        assert!(!t.pp_beats_classical); // 0.2 > threshold
        let t = power_check(0.3, 1e-9);
        // eta must be inside (0,1); a tiny eta is fine and always wins
        assert!(t.unwrap().pp_beats_classical);
    }

    #[test]
    fn perfect_predictions_leave_only_the_unlabeled_term() {
        // bias = noise = 0 makes the rectifier identically zero, so the pp
        // width is the pure 1/sqrt(N) term: far below classical and with
        // coverage at the nominal level
        let scenario =
            mean_scenario(Generator::Gaussian { bias: 0.0, noise: 0.0 }, 50, 5000, 60);
        let report = coverage_sim(&scenario).unwrap();
        assert!(report.coverage(0) >= 0.8, "{}", report.coverage(0));
        let pp = report.tally(0).mean_width;
        let classical = report.tally(1).mean_width;
        assert!(pp < classical / 5.0, "pp {pp} vs classical {classical}");
    }

    #[test]
    fn biased_imputation_undercovers() {
        let scenario =
            mean_scenario(Generator::Gaussian { bias: 1.0, noise: 0.1 }, 50, 2000, 60);
        let report = coverage_sim(&scenario).unwrap();
        assert!(report.coverage(2) < 0.5, "imputation coverage {}", report.coverage(2));
        assert!(report.coverage(0) >= 0.8, "pp coverage {}", report.coverage(0));
    }

    #[test]
    fn determinism_across_worker_counts() {
        let scenario =
            mean_scenario(Generator::Bernoulli { p: 0.4, error: 0.1 }, 40, 200, 12);
        let a = coverage_sim(&scenario).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| coverage_sim(&scenario)).unwrap();
        assert_eq!(
            emit_report(&a, ReportFormat::PlotData),
            emit_report(&b, ReportFormat::PlotData)
        );
        assert_eq!(emit_report(&a, ReportFormat::Csv), emit_report(&b, ReportFormat::Csv));
    }

    #[test]
    fn plotdata_has_three_rows_per_trial() {
        let scenario = mean_scenario(Generator::Bernoulli { p: 0.5, error: 0.2 }, 30, 100, 1);
        let report = coverage_sim(&scenario).unwrap();
        let bytes = emit_report(&report, ReportFormat::PlotData);
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().count(), 4); // header + pp + classical + imputation
    }

    #[test]
    fn classical_width_follows_root_n_law() {
        let mut widths = Vec::new();
        for &n in &[100usize, 400] {
            let scenario =
                mean_scenario(Generator::Gaussian { bias: 0.2, noise: 0.3 }, n, 100, 200);
            let report = coverage_sim(&scenario).unwrap();
            widths.push(report.tally(1).mean_width);
        }
        let ratio = widths[0] / widths[1];
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn labelshift_scenario_covers_target_prior() {
        let scenario = SimScenario {
            generator: Generator::LabelShift {
                source_prior: 0.5,
                target_prior: 0.7,
                confusion: 0.1,
            },
            n: 300,
            big_n: 3000,
            trials: 20,
            seed: 99,
            estimand: EstimandSpec::new(EstimandKind::Mean, 0.1)
                .unwrap()
                .with_delta(0.05)
                .unwrap(),
        };
        let report = coverage_sim(&scenario).unwrap();
        assert!(report.coverage(0) >= 0.9, "pp coverage {}", report.coverage(0));
    }

    #[test]
    fn covshift_scenario_covers_shifted_mean() {
        let scenario = SimScenario {
            generator: Generator::CovShift {
                weight_one: 0.8,
                weight_zero: 0.2,
                bias: 0.3,
                noise: 0.2,
            },
            n: 150,
            big_n: 1500,
            trials: 15,
            seed: 7,
            estimand: EstimandSpec::new(EstimandKind::Mean, 0.1).unwrap(),
        };
        let report = coverage_sim(&scenario).unwrap();
        assert!(report.coverage(0) >= 0.8, "pp coverage {}", report.coverage(0));
        // imputation is biased by construction
        assert!(report.coverage(2) <= 0.6, "imputation coverage {}", report.coverage(2));
    }

    #[test]
    fn unsupported_combination_is_rejected() {
        let scenario = SimScenario {
            generator: Generator::Bernoulli { p: 0.5, error: 0.1 },
            n: 10,
            big_n: 10,
            trials: 1,
            seed: 1,
            estimand: EstimandSpec::new(EstimandKind::Quantile(0.5), 0.1).unwrap(),
        };
        assert!(coverage_sim(&scenario).is_err());
    }
}
