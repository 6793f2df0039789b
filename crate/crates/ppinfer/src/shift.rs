//! Distribution-shift-robust inference.
//!
//! Covariate shift: when the unlabeled data follows a known reweighting of
//! the labeled feature distribution, risk minimizers under the target law
//! are risk minimizers of the reweighted loss under the source law, so the
//! whole convex pipeline applies with every gradient multiplied by the
//! Radon-Nikodym weight w(x).
//!
//! Label shift: classes keep their conditional feature laws but change
//! prevalence. The class-prevalence vector solves Q_f = K Q_Y for the
//! confusion matrix K, estimated column-by-column from labeled data; the
//! interval combines a binomial-tail confidence band on each confusion cell
//! with a uniform band on the empirical prediction distribution.

use nalgebra::{DMatrix, DVector};

use crate::data::{LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::estimators::{pp_convex, GradientSpec};
use crate::grid::{GridSet, GridSpec};
use crate::nonasymptotic::BudgetSplit;
use crate::stats::{binomial_cdf, Interval};

/// Radon-Nikodym derivative of the target feature law with respect to the
/// source feature law, evaluated per feature row.
pub struct WeightFunction {
    evaluate: Box<dyn Fn(&[f64]) -> f64 + Sync + Send>,
}

impl WeightFunction {
    pub fn new(evaluate: impl Fn(&[f64]) -> f64 + Sync + Send + 'static) -> Self {
        WeightFunction { evaluate: Box::new(evaluate) }
    }

    pub fn constant(w: f64) -> Self {
        WeightFunction { evaluate: Box::new(move |_| w) }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluate)(x)
    }
}

/// Covariate-shift convex estimation: the unweighted pipeline applied to the
/// gradient g(theta, x, y) * w(x). With w identically 1 the output is
/// bit-identical to [`pp_convex`] on the same inputs.
pub fn pp_convex_covshift(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    gradient: GradientSpec,
    weights: WeightFunction,
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    let empty: [f64; 0] = [];
    let check = |x: &[f64]| -> Result<()> {
        let w = weights.evaluate(x);
        if !w.is_finite() || w < 0.0 {
            return Err(Error::domain(format!("weight {w} is negative or non-finite")));
        }
        Ok(())
    };
    match labeled.features() {
        Some(rows) => {
            for row in rows {
                check(row)?;
            }
        }
        None => check(&empty)?,
    }
    match unlabeled.features() {
        Some(rows) => {
            for row in rows {
                check(row)?;
            }
        }
        None => check(&empty)?,
    }

    let dimension = gradient.dimension;
    let weighted = GradientSpec::new(dimension, move |theta, x, y| {
        let w = weights.evaluate(x);
        let mut g = gradient.evaluate(theta, x, y);
        for v in &mut g {
            *v *= w;
        }
        g
    })?;
    pp_convex(labeled, unlabeled, &weighted, alpha, grid)
}

// --- label shift ---------------------------------------------------------------

/// Column-stochastic confusion estimate: `matrix[j][l]` is the estimated
/// probability of predicting class j+1 given true class l+1.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionEstimate {
    pub matrix: Vec<Vec<f64>>,
    /// Labeled examples observed per true class.
    pub class_counts: Vec<usize>,
    pub classes: usize,
}

fn class_of(value: f64, classes: usize, what: &str) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 || value > classes as f64 {
        return Err(Error::domain(format!(
            "{what} value {value} is not an integer class in 1..={classes}"
        )));
    }
    Ok(value as usize - 1)
}

/// Estimate the confusion matrix from labeled categorical data.
///
/// The power of every downstream bound depends on the smallest per-class
/// count, so a class with no labeled examples is an error, not a zero
/// column.
pub fn estimate_confusion(labeled: &LabeledSet, classes: usize) -> Result<ConfusionEstimate> {
    if classes == 0 {
        return Err(Error::domain("need at least one class"));
    }
    let mut counts = vec![vec![0usize; classes]; classes];
    let mut class_counts = vec![0usize; classes];
    for i in 0..labeled.len() {
        let l = class_of(labeled.outcomes()[i], classes, "label")?;
        let j = class_of(labeled.predictions()[i], classes, "prediction")?;
        counts[j][l] += 1;
        class_counts[l] += 1;
    }
    for (l, &c) in class_counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::domain(format!(
                "class {} has no labeled examples; its confusion column cannot be estimated",
                l + 1
            )));
        }
    }
    let matrix = counts
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(l, &c)| c as f64 / class_counts[l] as f64)
                .collect()
        })
        .collect();
    Ok(ConfusionEstimate { matrix, class_counts, classes })
}

/// Interval for a linear functional of the target class prevalences, with
/// the empirical pieces it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelShiftResult {
    pub interval: Interval,
    /// Empirical prediction distribution on the unlabeled data.
    pub q_hat_f: Vec<f64>,
    /// Inverted prevalence estimate; sums to 1 but coordinates may be
    /// negative (no clipping, since the interval arithmetic is built around
    /// the raw linear estimate).
    pub q_hat_y: Vec<f64>,
    pub confusion_slack: f64,
    pub dkwm_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelShiftOptions {
    /// Follow the proof chain instead of the theorem statement: multiply the
    /// slack by ||nu^T K^-1||_1 and use the wider empirical-distribution
    /// radius sqrt((2/N) log(2/(alpha-delta))).
    pub proof_faithful: bool,
    /// Condition-number threshold beyond which the confusion matrix is
    /// treated as singular and no valid interval exists.
    pub condition_limit: f64,
}

impl Default for LabelShiftOptions {
    fn default() -> Self {
        LabelShiftOptions { proof_faithful: false, condition_limit: 1e8 }
    }
}

/// Label-shift interval with default options (theorem-statement widths).
///
/// The half-width does not depend on `nu`, which is conservative when
/// ||nu|| is small; scaling nu scales the center only.
pub fn label_shift_interval(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    nu: &[f64],
    split: BudgetSplit,
) -> Result<LabelShiftResult> {
    label_shift_interval_with(labeled, unlabeled, nu, split, &LabelShiftOptions::default())
}

pub fn label_shift_interval_with(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    nu: &[f64],
    split: BudgetSplit,
    options: &LabelShiftOptions,
) -> Result<LabelShiftResult> {
    let classes = nu.len();
    if classes == 0 {
        return Err(Error::domain("nu must have one entry per class"));
    }
    let confusion = estimate_confusion(labeled, classes)?;

    let mut q_hat_f = vec![0.0; classes];
    for &f in unlabeled.predictions() {
        q_hat_f[class_of(f, classes, "prediction")?] += 1.0;
    }
    let big_n = unlabeled.len() as f64;
    for v in &mut q_hat_f {
        *v /= big_n;
    }

    let k_hat = DMatrix::from_fn(classes, classes, |j, l| confusion.matrix[j][l]);
    let svd = k_hat.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 || smax / smin > options.condition_limit {
        return Err(Error::Numerical(format!(
            "confusion matrix condition number exceeds threshold {:.1e}; \
             the coverage guarantee cannot be honored",
            options.condition_limit
        )));
    }
    let k_inv = k_hat.clone().try_inverse().ok_or_else(|| {
        Error::Numerical("confusion matrix is not invertible".into())
    })?;
    let q_hat_y_vec = k_hat
        .lu()
        .solve(&DVector::from_column_slice(&q_hat_f))
        .ok_or_else(|| Error::Numerical("confusion matrix is not invertible".into()))?;
    let q_hat_y: Vec<f64> = q_hat_y_vec.iter().cloned().collect();
    let center: f64 = nu.iter().zip(&q_hat_y).map(|(a, b)| a * b).sum();

    // binomial confidence band per confusion cell
    let tail = split.delta / (2.0 * (classes * classes) as f64);
    let mut confusion_slack = 0.0_f64;
    for l in 0..classes {
        for k in 0..classes {
            let nk = confusion.class_counts[k];
            let c = (confusion.matrix[l][k] * nk as f64).round() as usize;
            let (p_lo, p_hi) = confusion_cell_region(c, nk, tail)?;
            let k_lk = confusion.matrix[l][k];
            confusion_slack = confusion_slack
                .max((k_lk - p_lo).abs())
                .max((k_lk - p_hi).abs());
        }
    }

    let log_term = (2.0 / split.remainder()).ln();
    let dkwm_slack = if options.proof_faithful {
        (2.0 / big_n * log_term).sqrt()
    } else {
        (log_term / (2.0 * big_n)).sqrt()
    };

    let mut half = confusion_slack + dkwm_slack;
    if options.proof_faithful {
        let nu_vec = DVector::from_column_slice(nu);
        let nu_inv = k_inv.transpose() * nu_vec;
        half *= nu_inv.iter().map(|v| v.abs()).sum::<f64>();
    }

    Ok(LabelShiftResult {
        interval: Interval::new(center - half, center + half, 1.0 - split.alpha)?,
        q_hat_f,
        q_hat_y,
        confusion_slack,
        dkwm_slack,
    })
}

/// Acceptance region [p_lo, p_hi] for one confusion cell: the success
/// probabilities under which the observed count is not in either binomial
/// tail at level `tail` per side. Both boundaries are roots of monotone
/// binomial-CDF conditions, located by bisection.
fn confusion_cell_region(count: usize, n: usize, tail: f64) -> Result<(f64, f64)> {
    // upper end: F_{n,p}(count) >= tail fails for large p
    let p_hi = if count == n {
        1.0
    } else {
        bisect_decreasing(|p| binomial_cdf(count, n, p), tail, n)?
    };
    // lower end: F_{n,p}(count - 1) < 1 - tail fails for small p
    let p_lo = if count == 0 {
        0.0
    } else {
        bisect_decreasing(|p| binomial_cdf(count - 1, n, p), 1.0 - tail, n)?
    };
    Ok((p_lo, p_hi))
}

/// Root of f(p) = target for f continuous and strictly decreasing in p on
/// [0, 1] with f(0) = 1, f(1) = 0.
fn bisect_decreasing(
    f: impl Fn(f64) -> Result<f64>,
    target: f64,
    _n: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
