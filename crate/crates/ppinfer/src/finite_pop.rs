//! Inference on a fixed finite population.
//!
//! All N feature rows and predictions are known; outcomes are observed only
//! on a uniformly sampled index subset of size n. The estimand is the value
//! the estimator would take if the whole population were labeled, and every
//! rectifier is a population mean of per-unit quantities observed on the
//! subset, so a without-replacement confidence interval (CLT with the
//! (N - n)/N correction, or the betting construction with putative means)
//! does all the work.
//!
//! Labeled indices are canonicalized by sorting, so results depend on the
//! subset as a set. The betting method additionally shuffles the processing
//! order with a caller-supplied seed, because its validity needs an ordering
//! that is exchangeable given the subset; the seed must not depend on the
//! data.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::betting::{wsr_finite_pop_ci, BettingConfig};
use crate::error::{Error, Result};
use crate::estimators::{pinv_matrix, to_matrix, GlmLink};
use crate::grid::{GridSet, GridSpec};
use crate::riskmin::{LossSpec, RiskRetention};
use crate::stats::{check_alpha, finite_pop_clt_interval, Interval};

/// A fixed population with a labeled subset.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePopulation {
    predictions: Vec<f64>,
    features: Option<Vec<Vec<f64>>>,
    labeled_indices: Vec<usize>,
    labeled_outcomes: Vec<f64>,
}

impl FinitePopulation {
    pub fn new(
        predictions: Vec<f64>,
        features: Option<Vec<Vec<f64>>>,
        labeled_indices: Vec<usize>,
        labeled_outcomes: Vec<f64>,
    ) -> Result<Self> {
        let big_n = predictions.len();
        if big_n == 0 {
            return Err(Error::domain("population must be nonempty"));
        }
        if predictions.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("population predictions must be finite"));
        }
        if let Some(rows) = &features {
            if rows.len() != big_n {
                return Err(Error::domain("feature rows must match the population size"));
            }
            let d = rows.first().map(|r| r.len()).unwrap_or(0);
            if rows.iter().any(|r| r.len() != d || r.iter().any(|v| !v.is_finite())) {
                return Err(Error::domain("feature rows must be rectangular and finite"));
            }
        }
        if labeled_indices.is_empty() {
            return Err(Error::domain("labeled subset must be nonempty"));
        }
        if labeled_indices.len() != labeled_outcomes.len() {
            return Err(Error::domain("labeled indices and outcomes must align"));
        }
        if labeled_outcomes.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("labeled outcomes must be finite"));
        }
        // canonical order: sort by index, results depend on the subset only
        let mut pairs: Vec<(usize, f64)> =
            labeled_indices.into_iter().zip(labeled_outcomes).collect();
        pairs.sort_by_key(|&(i, _)| i);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::domain(format!("labeled index {} repeated", w[0].0)));
            }
        }
        if let Some(&(last, _)) = pairs.last() {
            if last >= big_n {
                return Err(Error::domain(format!(
                    "labeled index {last} out of range for population of {big_n}"
                )));
            }
        }
        let (labeled_indices, labeled_outcomes) = pairs.into_iter().unzip();
        Ok(FinitePopulation { predictions, features, labeled_indices, labeled_outcomes })
    }

    pub fn population_size(&self) -> usize {
        self.predictions.len()
    }

    pub fn labeled_size(&self) -> usize {
        self.labeled_indices.len()
    }

    pub fn dim(&self) -> usize {
        self.features.as_ref().map(|f| f[0].len()).unwrap_or(0)
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    pub fn labeled_indices(&self) -> &[usize] {
        &self.labeled_indices
    }

    pub fn labeled_outcomes(&self) -> &[f64] {
        &self.labeled_outcomes
    }

    fn require_features(&self, who: &str) -> Result<&[Vec<f64>]> {
        self.features
            .as_deref()
            .ok_or_else(|| Error::domain(format!("{who} requires feature columns")))
    }

    /// Assemble a population from a loaded CSV and an index manifest; every
    /// manifest row must carry an outcome.
    pub fn from_file(file: crate::data::PopulationFile, indices: Vec<usize>) -> Result<Self> {
        let mut outcomes = Vec::with_capacity(indices.len());
        for &i in &indices {
            let y = file
                .outcomes
                .get(i)
                .ok_or_else(|| Error::domain(format!("manifest index {i} out of range")))?
                .ok_or_else(|| {
                    Error::domain(format!("manifest row {i} has no outcome value"))
                })?;
            outcomes.push(y);
        }
        FinitePopulation::new(file.predictions, file.features, indices, outcomes)
    }
}

/// Which without-replacement interval backs the rectifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FpMethod {
    /// CLT with the finite-population correction; the default.
    Clt,
    /// Betting construction with putative means. `outcome_low/high` bound
    /// the unobserved outcomes (needed only where the rectifier range
    /// depends on them); `shuffle_seed` fixes the processing order.
    Wsr { outcome_low: f64, outcome_high: f64, shuffle_seed: u64 },
}

/// Without-replacement CI on per-unit rectifier samples whose population
/// values are bounded by `range`.
fn rectifier_ci(
    samples: &[f64],
    population_size: usize,
    alpha: f64,
    method: &FpMethod,
    range: (f64, f64),
) -> Result<Interval> {
    match method {
        FpMethod::Clt => finite_pop_clt_interval(samples, population_size, alpha),
        FpMethod::Wsr { shuffle_seed, .. } => {
            let mut order: Vec<usize> = (0..samples.len()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(*shuffle_seed));
            let shuffled: Vec<f64> = order.iter().map(|&i| samples[i]).collect();
            let (lo, hi) = range;
            let config = if lo < hi {
                BettingConfig::new(alpha, lo, hi)?
            } else {
                // constant rectifier: any enclosing window works
                BettingConfig::new(alpha, lo - 0.5, hi + 0.5)?
            };
            wsr_finite_pop_ci(&shuffled, population_size, &config)
        }
    }
}

fn outcome_bounds(method: &FpMethod, outcomes: &[f64]) -> Result<(f64, f64)> {
    match method {
        FpMethod::Clt => Ok((f64::NAN, f64::NAN)), // unused
        FpMethod::Wsr { outcome_low, outcome_high, .. } => {
            if outcome_low >= outcome_high {
                return Err(Error::domain("outcome bounds must satisfy low < high"));
            }
            if outcomes.iter().any(|&y| y < *outcome_low || y > *outcome_high) {
                return Err(Error::domain(
                    "an observed outcome escapes the declared outcome bounds",
                ));
            }
            Ok((*outcome_low, *outcome_high))
        }
    }
}

/// Finite-population prediction-powered mean: the population mean of the
/// predictions, shifted by a without-replacement CI on the per-unit
/// prediction errors over the labeled subset.
pub fn fp_pp_mean(pop: &FinitePopulation, alpha: f64, method: &FpMethod) -> Result<Interval> {
    check_alpha(alpha)?;
    let samples: Vec<f64> = pop
        .labeled_indices
        .iter()
        .zip(&pop.labeled_outcomes)
        .map(|(&i, &y)| pop.predictions[i] - y)
        .collect();
    let range = match method {
        FpMethod::Clt => (0.0, 0.0),
        FpMethod::Wsr { .. } => {
            let (lo_y, hi_y) = outcome_bounds(method, &pop.labeled_outcomes)?;
            let fmin = pop.predictions.iter().cloned().fold(f64::INFINITY, f64::min);
            let fmax = pop.predictions.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (fmin - hi_y, fmax - lo_y)
        }
    };
    let rect = rectifier_ci(&samples, pop.population_size(), alpha, method, range)?;
    let mean_f =
        pop.predictions.iter().sum::<f64>() / pop.population_size() as f64;
    let mut iv = Interval::new(mean_f - rect.upper, mean_f - rect.lower, 1.0 - alpha)?;
    iv.degenerate = rect.degenerate;
    Ok(iv)
}

/// Finite-population quantile set: retains theta when the population
/// prediction CDF lies in `[q - R_upper(theta), q - R_lower(theta)]`.
pub fn fp_pp_quantile(
    pop: &FinitePopulation,
    q: f64,
    alpha: f64,
    grid: &GridSpec,
    method: &FpMethod,
) -> Result<GridSet> {
    check_alpha(alpha)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    if grid.dim() != 1 {
        return Err(Error::domain("quantile estimation uses a 1-d grid"));
    }
    let axis = &grid.axes[0];
    let fmin = pop.predictions.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = pop.predictions.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if axis.low > fmin || axis.high < fmax {
        return Err(Error::domain(format!(
            "grid [{}, {}] must span the population predictions [{fmin}, {fmax}]",
            axis.low, axis.high
        )));
    }
    let big_n = pop.population_size();
    let mut retained = Vec::new();
    for idx in 0..grid.len() {
        let theta = axis.point(idx);
        let samples: Vec<f64> = pop
            .labeled_indices
            .iter()
            .zip(&pop.labeled_outcomes)
            .map(|(&i, &y)| {
                ((y <= theta) as i32 - (pop.predictions[i] <= theta) as i32) as f64
            })
            .collect();
        let rect = rectifier_ci(&samples, big_n, alpha, method, (-1.0, 1.0))?;
        let cdf = pop.predictions.iter().filter(|&&f| f <= theta).count() as f64 / big_n as f64;
        if cdf >= q - rect.upper && cdf <= q - rect.lower {
            retained.push(idx);
        }
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

/// Finite-population logistic set: per coordinate (budget alpha/d), retains
/// theta when the population imputed score `mean x_j (f - mu_theta)` lies in
/// the rectifier interval for `mean x_j (f - y)`.
pub fn fp_pp_logistic(
    pop: &FinitePopulation,
    alpha: f64,
    grid: &GridSpec,
    method: &FpMethod,
) -> Result<GridSet> {
    check_alpha(alpha)?;
    let xs = pop.require_features("finite-population logistic regression")?;
    let d = pop.dim();
    if grid.dim() != d {
        return Err(Error::domain("grid and feature dimensions must agree"));
    }
    let in_unit = |v: &f64| (0.0..=1.0).contains(v);
    if !pop.predictions.iter().all(in_unit) || !pop.labeled_outcomes.iter().all(in_unit) {
        return Err(Error::domain(
            "logistic regression requires outcomes and predictions in [0, 1]",
        ));
    }
    let big_n = pop.population_size();
    let per_coord = alpha / d as f64;
    let mut rect_ivs = Vec::with_capacity(d);
    for j in 0..d {
        let samples: Vec<f64> = pop
            .labeled_indices
            .iter()
            .zip(&pop.labeled_outcomes)
            .map(|(&i, &y)| xs[i][j] * (pop.predictions[i] - y))
            .collect();
        let bj = xs.iter().map(|row| row[j].abs()).fold(0.0, f64::max).max(1e-12);
        rect_ivs.push(rectifier_ci(&samples, big_n, per_coord, method, (-bj, bj))?);
    }

    let mut retained = Vec::new();
    'grid: for idx in 0..grid.len() {
        let theta = grid.point(idx);
        for j in 0..d {
            let mut score = 0.0;
            for i in 0..big_n {
                let eta: f64 = xs[i].iter().zip(&theta).map(|(a, b)| a * b).sum();
                score += xs[i][j] * (pop.predictions[i] - GlmLink::Logistic.mean(eta));
            }
            score /= big_n as f64;
            if score < rect_ivs[j].lower || score > rect_ivs[j].upper {
                continue 'grid;
            }
        }
        retained.push(idx);
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

/// Finite-population OLS: one interval per coordinate around the imputed
/// population fit, shifted by a CI on the subset-estimated rectifier
/// `pinv(X) (f - Y)`. Coordinates share the budget alpha/d, so the family is
/// jointly valid at level 1 - alpha.
pub fn fp_pp_ols(pop: &FinitePopulation, alpha: f64, method: &FpMethod) -> Result<Vec<Interval>> {
    check_alpha(alpha)?;
    let xs = pop.require_features("finite-population linear regression")?;
    let d = pop.dim();
    let big_n = pop.population_size();
    if big_n <= d {
        return Err(Error::domain("population must have more rows than features"));
    }
    let x = to_matrix(xs);
    let pinv = pinv_matrix(&x, "population design")?; // d x N
    let imputed: Vec<f64> = (0..d)
        .map(|j| (0..big_n).map(|i| pinv[(j, i)] * pop.predictions[i]).sum())
        .collect();

    let per_coord = alpha / d as f64;
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let samples: Vec<f64> = pop
            .labeled_indices
            .iter()
            .zip(&pop.labeled_outcomes)
            .map(|(&i, &y)| big_n as f64 * pinv[(j, i)] * (pop.predictions[i] - y))
            .collect();
        let range = match method {
            FpMethod::Clt => (0.0, 0.0),
            FpMethod::Wsr { .. } => {
                let (lo_y, hi_y) = outcome_bounds(method, &pop.labeled_outcomes)?;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..big_n {
                    let w = big_n as f64 * pinv[(j, i)];
                    let a = w * (pop.predictions[i] - hi_y);
                    let b = w * (pop.predictions[i] - lo_y);
                    lo = lo.min(a.min(b));
                    hi = hi.max(a.max(b));
                }
                (lo, hi)
            }
        };
        let rect = rectifier_ci(&samples, big_n, per_coord, method, range)?;
        let mut iv =
            Interval::new(imputed[j] - rect.upper, imputed[j] - rect.lower, 1.0 - alpha)?;
        iv.degenerate = rect.degenerate;
        out.push(iv);
    }
    Ok(out)
}

/// Finite-population risk minimization. The imputed argmin is deterministic
/// (it uses all N predictions), so no data splitting is needed; candidates
/// survive when their imputed loss is within the rectifier slack of the
/// argmin's, with two-sided bounds at level alpha/2.
pub fn fp_risk_min(
    pop: &FinitePopulation,
    loss: &LossSpec,
    alpha: f64,
    method: &FpMethod,
) -> Result<RiskRetention> {
    check_alpha(alpha)?;
    let theta = loss.resolve_theta(&pop.predictions)?;
    let big_n = pop.population_size();
    static EMPTY: [f64; 0] = [];
    let feat = |i: usize| -> &[f64] {
        pop.features.as_ref().map(|f| f[i].as_slice()).unwrap_or(&EMPTY)
    };

    let mut levels = Vec::with_capacity(theta.len());
    for &t in &theta {
        let mut acc = 0.0;
        for i in 0..big_n {
            acc += loss.loss(t, feat(i), pop.predictions[i])?;
        }
        levels.push(acc / big_n as f64);
    }
    let mut argmin = 0usize;
    for (k, &v) in levels.iter().enumerate() {
        if v < levels[argmin] {
            argmin = k;
        }
    }

    let mut rect_ivs = Vec::with_capacity(theta.len());
    for &t in &theta {
        let samples: Vec<f64> = pop
            .labeled_indices
            .iter()
            .zip(&pop.labeled_outcomes)
            .map(|(&i, &y)| {
                Ok(loss.loss(t, feat(i), y)? - loss.loss(t, feat(i), pop.predictions[i])?)
            })
            .collect::<Result<_>>()?;
        rect_ivs.push(rectifier_ci(
            &samples,
            big_n,
            alpha / 2.0,
            method,
            (-loss.bound, loss.bound),
        )?);
    }

    let reference = levels[argmin] + rect_ivs[argmin].upper;
    let retained: Vec<usize> = (0..theta.len())
        .filter(|&k| levels[k] + rect_ivs[k].lower <= reference)
        .collect();
    Ok(RiskRetention { theta, retained, imputed_argmin: argmin, level: 1.0 - alpha })
}
