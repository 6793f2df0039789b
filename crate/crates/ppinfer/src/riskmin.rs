//! General (possibly nonconvex, constrained) risk minimization.
//!
//! Unlike the convex pipeline, nothing pins the optimal loss value to a
//! gradient condition, so the retention rule compares full loss levels: a
//! candidate survives when its imputed out-of-split loss is within the
//! combined rectifier-plus-Hoeffding slack of the best candidate's. The
//! unlabeled data is split so the imputed argmin and the loss levels it is
//! compared against come from disjoint halves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::betting::{wsr_mean_ci, BettingConfig};
use crate::data::{LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::nonasymptotic::BudgetSplit;
use crate::stats::Interval;

/// A bounded loss over a finite (or gridded one-dimensional) parameter set.
pub struct LossSpec {
    evaluate: Box<dyn Fn(f64, &[f64], f64) -> f64 + Sync + Send>,
    /// Loss values live in [0, bound].
    pub bound: f64,
    /// Explicit parameter set; when absent, a 512-point grid spanning the
    /// unlabeled predictions padded by `pad` is built at call time.
    pub theta: Option<Vec<f64>>,
    pad: f64,
}

impl LossSpec {
    pub fn new(
        evaluate: impl Fn(f64, &[f64], f64) -> f64 + Sync + Send + 'static,
        bound: f64,
    ) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::domain("loss bound must be positive and finite"));
        }
        Ok(LossSpec { evaluate: Box::new(evaluate), bound, theta: None, pad: 1.0 })
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::domain("parameter set must be nonempty"));
        }
        self.theta = Some(theta);
        Ok(self)
    }

    /// Evaluate and enforce boundedness.
    pub fn loss(&self, theta: f64, x: &[f64], y: f64) -> Result<f64> {
        let v = (self.evaluate)(theta, x, y);
        if !(v.is_finite() && v >= 0.0 && v <= self.bound * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "loss value {v} at theta = {theta} escapes [0, {}]",
                self.bound
            )));
        }
        Ok(v)
    }

    /// Resolve the parameter set, building the default grid if needed.
    pub fn resolve_theta(&self, predictions: &[f64]) -> Result<Vec<f64>> {
        if let Some(t) = &self.theta {
            return Ok(t.clone());
        }
        let lo = predictions.iter().cloned().fold(f64::INFINITY, f64::min) - self.pad;
        let hi = predictions.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + self.pad;
        const POINTS: usize = 512;
        Ok((0..POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (POINTS - 1) as f64)
            .collect())
    }
}

/// Neighborhood-miss loss 1{|y - theta| > eta}: the minimizer is the point
/// with the most probability mass in its eta-neighborhood. The boundary
/// |y - theta| = eta counts as a hit.
pub fn mode_loss(eta: f64) -> Result<LossSpec> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::domain("mode neighborhood width must be positive"));
    }
    let mut spec = LossSpec::new(
        move |theta, _x, y| if (y - theta).abs() > eta { 1.0 } else { 0.0 },
        1.0,
    )?;
    spec.pad = eta;
    Ok(spec)
}

/// Exact-mismatch loss 1{y != theta} for discrete outcomes; supply the
/// candidate set through [`LossSpec::with_theta`].
pub fn discrete_mode_loss() -> Result<LossSpec> {
    LossSpec::new(|theta, _x, y| if y != theta { 1.0 } else { 0.0 }, 1.0)
}

/// Tukey biweight loss: cubic in (y - theta)^2 inside [-c, c], constant
/// c^2/6 outside.
pub fn tukey_loss(c: f64) -> Result<LossSpec> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain("Tukey scale must be positive"));
    }
    let cap = c * c / 6.0;
    let mut spec = LossSpec::new(
        move |theta, _x, y| {
            let r = y - theta;
            if r.abs() <= c {
                let u = 1.0 - (r * r) / (c * c);
                cap * (1.0 - u * u * u)
            } else {
                cap
            }
        },
        cap,
    )?;
    spec.pad = c;
    Ok(spec)
}

/// Disjoint, exhaustive split of the unlabeled indices; the imputed argmin
/// comes from `first`, the compared loss levels from `second`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    /// Shuffle seed when the plan was generated, echoed for reproducibility.
    pub seed: Option<u64>,
}

impl SplitPlan {
    /// First floor(N/2) indices of a seeded shuffle of 0..N.
    pub fn seeded(n_unlabeled: usize, seed: u64) -> Result<Self> {
        if n_unlabeled < 2 {
            return Err(Error::domain("splitting requires at least 2 unlabeled rows"));
        }
        let mut indices: Vec<usize> = (0..n_unlabeled).collect();
        indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let half = n_unlabeled / 2;
        let second = indices.split_off(half);
        Ok(SplitPlan { first: indices, second, seed: Some(seed) })
    }

    pub fn from_halves(first: Vec<usize>, second: Vec<usize>, n_unlabeled: usize) -> Result<Self> {
        let mut seen = vec![false; n_unlabeled];
        for &i in first.iter().chain(&second) {
            if i >= n_unlabeled {
                return Err(Error::domain(format!("split index {i} out of range")));
            }
            if seen[i] {
                return Err(Error::domain(format!("split index {i} repeated")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::domain("split must cover every unlabeled row"));
        }
        if first.len().abs_diff(second.len()) > 1 {
            return Err(Error::domain("split halves must differ in size by at most 1"));
        }
        Ok(SplitPlan { first, second, seed: None })
    }
}

/// Retained parameter subset with the index of the imputed argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRetention {
    pub theta: Vec<f64>,
    /// Indices into `theta`, ascending. The imputed argmin is always
    /// retained.
    pub retained: Vec<usize>,
    pub imputed_argmin: usize,
    pub level: f64,
}

impl RiskRetention {
    pub fn retained_values(&self) -> Vec<f64> {
        self.retained.iter().map(|&i| self.theta[i]).collect()
    }
}

/// One-sided Hoeffding width `B sqrt(log(1/level) / m)` for a mean of m
/// bounded losses; `level` is the per-side failure probability.
pub fn hoeffding_width(bound: f64, level: f64, m: usize) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level {level} outside (0, 1)")));
    }
    if m == 0 {
        return Err(Error::domain("Hoeffding width needs at least one sample"));
    }
    Ok(bound * ((1.0 / level).ln() / m as f64).sqrt())
}

fn features_or_empty<'a>(features: Option<&'a [Vec<f64>]>, i: usize) -> &'a [f64] {
    static EMPTY: [f64; 0] = [];
    features.map(|f| f[i].as_slice()).unwrap_or(&EMPTY)
}

/// Prediction-powered risk minimization.
///
/// Computes the imputed argmin on the first unlabeled half, evaluates the
/// imputed loss of every candidate on the second half, bounds the rectifier
/// (the labeled loss difference) per candidate with a two-sided betting
/// interval at level delta/2 so each one-sided bound holds with probability
/// at least 1 - delta/2, and retains every candidate whose loss level is
/// within the combined slack. Ties in the argmin break toward the lowest
/// index.
pub fn pp_risk_min(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    loss: &LossSpec,
    split: BudgetSplit,
    plan: &SplitPlan,
) -> Result<RiskRetention> {
    if plan.first.len() + plan.second.len() != unlabeled.len() {
        return Err(Error::domain("split plan does not match the unlabeled set"));
    }
    if plan.first.is_empty() || plan.second.is_empty() {
        return Err(Error::domain("both split halves must be nonempty"));
    }
    let theta = loss.resolve_theta(unlabeled.predictions())?;
    let uf = unlabeled.features();
    let lf = labeled.features();
    let preds = unlabeled.predictions();

    let half_loss = |theta_v: f64, half: &[usize]| -> Result<f64> {
        let mut acc = 0.0;
        for &i in half {
            acc += loss.loss(theta_v, features_or_empty(uf, i), preds[i])?;
        }
        Ok(acc / half.len() as f64)
    };

    // imputed argmin on the first half, lowest index on ties
    let mut imputed_argmin = 0usize;
    let mut best = f64::INFINITY;
    for (k, &t) in theta.iter().enumerate() {
        let v = half_loss(t, &plan.first)?;
        if v < best {
            best = v;
            imputed_argmin = k;
        }
    }

    // out-of-split loss levels and rectifier intervals per candidate; the
    // betting pass consumes labeled rows in a fixed exchangeable order
    let rect_config = BettingConfig::new(split.delta / 2.0, -loss.bound, loss.bound)?;
    let rect_order = crate::nonasymptotic::exchangeable_order(labeled.len());
    let mut levels = Vec::with_capacity(theta.len());
    let mut rect_ivs: Vec<Interval> = Vec::with_capacity(theta.len());
    for &t in &theta {
        levels.push(half_loss(t, &plan.second)?);
        let samples: Vec<f64> = rect_order
            .iter()
            .map(|&i| {
                let x = features_or_empty(lf, i);
                Ok(loss.loss(t, x, labeled.outcomes()[i])?
                    - loss.loss(t, x, labeled.predictions()[i])?)
            })
            .collect::<Result<_>>()?;
        rect_ivs.push(wsr_mean_ci(&samples, &rect_config)?);
    }

    let t_width = hoeffding_width(loss.bound, split.remainder() / 2.0, plan.second.len())?;
    let reference = levels[imputed_argmin] + rect_ivs[imputed_argmin].upper + 2.0 * t_width;
    let retained: Vec<usize> = (0..theta.len())
        .filter(|&k| levels[k] + rect_ivs[k].lower <= reference)
        .collect();

    Ok(RiskRetention { theta, retained, imputed_argmin, level: 1.0 - split.alpha })
}
