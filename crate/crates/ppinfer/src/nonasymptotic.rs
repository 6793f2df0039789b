//! Finite-sample-valid counterparts of the asymptotic estimators, built on
//! the betting mean intervals, plus the generic Minkowski-sum combiner.
//!
//! The error budget alpha is split as (delta, alpha - delta): delta buys the
//! rectifier confidence set from the n labeled points, the remainder buys
//! the imputed-quantity set from the N predictions. Validity is a union
//! bound, so any split works; the default is the symmetric delta = alpha/2.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::betting::{wsr_mean_ci, BettingConfig};
use crate::data::{LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::grid::{GridSet, GridSpec};
use crate::stats::Interval;

/// The betting recursion needs samples in an exchangeable order. Rows of a
/// CSV often arrive sorted, which is a data-dependent order that voids the
/// guarantee, so every operation here processes data through one fixed,
/// data-independent permutation. For i.i.d. samples this changes nothing
/// distributionally; results stay deterministic.
pub(crate) fn exchangeable_order(len: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x9e37_79b9));
    order
}

/// A betting set can reject every candidate (probability at most its error
/// level, already inside the union-bound budget); per-grid-point estimators
/// then simply drop the point instead of failing the whole set.
fn wsr_or_empty(samples: &[f64], config: &BettingConfig) -> Result<Option<Interval>> {
    match wsr_mean_ci(samples, config) {
        Ok(iv) => Ok(Some(iv)),
        Err(Error::Numerical(_)) => Ok(None),
        Err(other) => Err(other),
    }
}

/// Error budget split 0 < delta < alpha < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSplit {
    pub alpha: f64,
    pub delta: f64,
}

impl BudgetSplit {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha {alpha} outside (0, 1)")));
        }
        if !(delta > 0.0 && delta < alpha) {
            return Err(Error::domain(format!(
                "delta {delta} must lie strictly inside (0, alpha = {alpha})"
            )));
        }
        Ok(BudgetSplit { alpha, delta })
    }

    /// Symmetric default delta = alpha / 2.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        BudgetSplit::new(alpha, alpha / 2.0)
    }

    pub fn remainder(&self) -> f64 {
        self.alpha - self.delta
    }
}

/// Nonasymptotic prediction-powered mean interval for outcomes and
/// predictions bounded in [0, B]: a betting interval on the predictions at
/// level alpha - delta, shifted by a betting interval on the prediction
/// errors at level delta.
pub fn pp_mean_na(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    split: BudgetSplit,
    bound: f64,
) -> Result<Interval> {
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::domain("bound B must be positive and finite"));
    }
    let pred_config = BettingConfig::new(split.remainder(), 0.0, bound)?;
    let rect_config = BettingConfig::new(split.delta, -bound, bound)?;
    let pred_order = exchangeable_order(unlabeled.len());
    let preds: Vec<f64> =
        pred_order.iter().map(|&i| unlabeled.predictions()[i]).collect();
    let rect_order = exchangeable_order(labeled.len());
    let errors_raw = labeled.prediction_errors();
    let errors: Vec<f64> = rect_order.iter().map(|&i| errors_raw[i]).collect();
    let pred_iv = wsr_mean_ci(&preds, &pred_config)?;
    let rect_iv = wsr_mean_ci(&errors, &rect_config)?;
    Interval::new(
        pred_iv.lower - rect_iv.upper,
        pred_iv.upper - rect_iv.lower,
        1.0 - split.alpha,
    )
}

/// Nonasymptotic quantile set: retains theta with
/// `q in [F_lo(theta) + R_lo(theta), F_hi(theta) + R_hi(theta)]`,
/// both bands coming from betting intervals. Membership is closed since
/// betting sets are closed.
pub fn pp_quantile_na(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    q: f64,
    split: BudgetSplit,
    grid: &GridSpec,
) -> Result<GridSet> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    if grid.dim() != 1 {
        return Err(Error::domain("quantile estimation uses a 1-d grid"));
    }
    let rect_config = BettingConfig::new(split.delta, -1.0, 1.0)?;
    let cdf_config = BettingConfig::new(split.remainder(), 0.0, 1.0)?;
    let rect_order = exchangeable_order(labeled.len());
    let cdf_order = exchangeable_order(unlabeled.len());
    let axis = &grid.axes[0];
    let mut retained = Vec::new();
    for idx in 0..grid.len() {
        let theta = axis.point(idx);
        let rect_samples: Vec<f64> = rect_order
            .iter()
            .map(|&i| {
                ((labeled.outcomes()[i] <= theta) as i32
                    - (labeled.predictions()[i] <= theta) as i32) as f64
            })
            .collect();
        let cdf_samples: Vec<f64> = cdf_order
            .iter()
            .map(|&i| (unlabeled.predictions()[i] <= theta) as i32 as f64)
            .collect();
        let (rect_iv, cdf_iv) = match (
            wsr_or_empty(&rect_samples, &rect_config)?,
            wsr_or_empty(&cdf_samples, &cdf_config)?,
        ) {
            (Some(r), Some(c)) => (r, c),
            _ => continue,
        };
        if q >= cdf_iv.lower + rect_iv.lower && q <= cdf_iv.upper + rect_iv.upper {
            retained.push(idx);
        }
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - split.alpha))
}

/// Nonasymptotic logistic regression set. Per coordinate j the rectifier
/// interval is a betting CI on X_j (f - Y) at level delta over
/// [-B_j, B_j], and the imputed-gradient interval spends (alpha - delta)/d;
/// theta is retained when every coordinate's summed interval straddles 0.
pub fn pp_logistic_na(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    split: BudgetSplit,
    grid: &GridSpec,
    bounds: &[f64],
) -> Result<GridSet> {
    let xl = labeled.require_features("nonasymptotic logistic regression")?;
    let xu = unlabeled.require_features("nonasymptotic logistic regression")?;
    let d = labeled.dim();
    if unlabeled.dim() != d || grid.dim() != d {
        return Err(Error::domain("feature and grid dimensions must agree"));
    }
    if bounds.len() != d {
        return Err(Error::domain(format!("expected {d} coordinate bounds, got {}", bounds.len())));
    }
    let in_unit = |v: &f64| (0.0..=1.0).contains(v);
    if !labeled.outcomes().iter().all(in_unit)
        || !labeled.predictions().iter().all(in_unit)
        || !unlabeled.predictions().iter().all(in_unit)
    {
        return Err(Error::domain(
            "logistic regression requires outcomes and predictions in [0, 1]",
        ));
    }
    for j in 0..d {
        let bj = bounds[j];
        if xl.iter().chain(xu.iter()).any(|row| row[j].abs() > bj) {
            return Err(Error::domain(format!(
                "feature coordinate {j} exceeds its declared bound {bj}"
            )));
        }
    }

    // rectifier intervals are constant in theta
    let rect_order = exchangeable_order(labeled.len());
    let mut rect_ivs = Vec::with_capacity(d);
    for j in 0..d {
        let samples: Vec<f64> = rect_order
            .iter()
            .map(|&i| xl[i][j] * (labeled.predictions()[i] - labeled.outcomes()[i]))
            .collect();
        let config = BettingConfig::new(split.delta, -bounds[j], bounds[j])?;
        rect_ivs.push(wsr_mean_ci(&samples, &config)?);
    }

    let grad_err = split.remainder() / d as f64;
    let grad_order = exchangeable_order(unlabeled.len());
    let mut retained = Vec::new();
    let mut samples = vec![0.0; unlabeled.len()];
    'grid: for idx in 0..grid.len() {
        let theta = grid.point(idx);
        for j in 0..d {
            for (slot, &i) in grad_order.iter().enumerate() {
                let eta: f64 = xu[i].iter().zip(&theta).map(|(a, b)| a * b).sum();
                let mu = 1.0 / (1.0 + (-eta).exp());
                samples[slot] = xu[i][j] * (mu - unlabeled.predictions()[i]);
            }
            let config = BettingConfig::new(grad_err, -bounds[j], bounds[j])?;
            let grad_iv = match wsr_or_empty(&samples, &config)? {
                Some(iv) => iv,
                None => continue 'grid,
            };
            let lo = grad_iv.lower + rect_ivs[j].lower;
            let hi = grad_iv.upper + rect_ivs[j].upper;
            if 0.0 < lo || 0.0 > hi {
                continue 'grid;
            }
        }
        retained.push(idx);
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - split.alpha))
}

/// Generic combiner: retain theta exactly when 0 lies in the Minkowski sum
/// of its rectifier interval and its imputed-quantity interval.
pub fn combine_minkowski(
    rectifier: &[Interval],
    prediction: &[Interval],
    grid: &GridSpec,
) -> Result<GridSet> {
    if rectifier.len() != grid.len() || prediction.len() != grid.len() {
        return Err(Error::domain(format!(
            "interval families (lengths {} and {}) must match the grid ({} points)",
            rectifier.len(),
            prediction.len(),
            grid.len()
        )));
    }
    let level: f64 = match (rectifier.first(), prediction.first()) {
        (Some(r), Some(t)) => 1.0 - ((1.0 - r.level) + (1.0 - t.level)),
        _ => return Err(Error::domain("empty interval families")),
    };
    let retained = (0..grid.len())
        .filter(|&i| {
            let lo = rectifier[i].lower + prediction[i].lower;
            let hi = rectifier[i].upper + prediction[i].upper;
            lo <= 0.0 && 0.0 <= hi
        })
        .collect();
    Ok(GridSet::new(grid.clone(), retained, level.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LabeledSet, UnlabeledSet};

    fn labeled(y: &[f64], f: &[f64]) -> LabeledSet {
        LabeledSet::from_pairs(y.to_vec(), f.to_vec()).unwrap()
    }

    #[test]
    fn budget_split_validation() {
        assert!(BudgetSplit::new(0.1, 0.05).is_ok());
        assert!(BudgetSplit::new(0.1, 0.1).is_err());
        assert!(BudgetSplit::new(0.1, 0.0).is_err());
        let s = BudgetSplit::symmetric(0.1).unwrap();
        assert!((s.delta - 0.05).abs() < 1e-15);
    }

    #[test]
    fn mean_na_contains_constant_prediction() {
        let y: Vec<f64> = vec![0.4; 30];
        let l = labeled(&y, &y);
        let u = UnlabeledSet::from_predictions(vec![0.4; 200]).unwrap();
        let split = BudgetSplit::symmetric(0.05).unwrap();
        let iv = pp_mean_na(&l, &u, split, 1.0).unwrap();
        assert!(iv.contains(0.4), "{iv:?}");
    }

    #[test]
    fn mean_na_width_is_sum_of_component_widths() {
        let y = [0.1, 0.6, 0.3, 0.9, 0.5, 0.2, 0.8, 0.4];
        let f = [0.2, 0.5, 0.4, 0.8, 0.5, 0.3, 0.7, 0.5];
        let l = labeled(&y, &f);
        let fu: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).fract()).collect();
        let u = UnlabeledSet::from_predictions(fu.clone()).unwrap();
        let split = BudgetSplit::new(0.1, 0.04).unwrap();
        let iv = pp_mean_na(&l, &u, split, 1.0).unwrap();

        // recompute the two components in the same exchangeable order
        let pred_shuffled: Vec<f64> =
            exchangeable_order(fu.len()).iter().map(|&i| fu[i]).collect();
        let errors = l.prediction_errors();
        let rect_shuffled: Vec<f64> =
            exchangeable_order(errors.len()).iter().map(|&i| errors[i]).collect();
        let pred_iv =
            wsr_mean_ci(&pred_shuffled, &BettingConfig::new(0.06, 0.0, 1.0).unwrap()).unwrap();
        let rect_iv =
            wsr_mean_ci(&rect_shuffled, &BettingConfig::new(0.04, -1.0, 1.0).unwrap()).unwrap();
        assert!((iv.width() - (pred_iv.width() + rect_iv.width())).abs() < 1e-12);
    }

    #[test]
    fn quantile_na_constant_predictions_retain_confirmed_point() {
        let y = [0.45, 0.5, 0.55, 0.5];
        let f = [0.5, 0.5, 0.5, 0.5];
        let l = labeled(&y, &f);
        let u = UnlabeledSet::from_predictions(vec![0.5; 40]).unwrap();
        let grid = GridSpec::linear(0.0, 1.0, 21).unwrap(); // includes 0.5
        let split = BudgetSplit::symmetric(0.1).unwrap();
        let set = pp_quantile_na(&l, &u, 0.5, split, &grid).unwrap();
        let retained = set.retained_scalars().unwrap();
        assert!(retained.contains(&0.5), "{retained:?}");
    }

    #[test]
    fn quantile_na_extreme_q_clings_to_top_or_empties() {
        // plenty of labeled data keeps the rectifier band tight; with only
        // 10 unlabeled points the empirical CDF cannot certify q = 0.999
        // anywhere except where it reaches 1 at the top of the grid.
        let y: Vec<f64> = (0..200).map(|i| (i % 10) as f64 / 10.0).collect();
        let l = labeled(&y, &y);
        let fu: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let u = UnlabeledSet::from_predictions(fu).unwrap();
        let grid = GridSpec::linear(0.0, 1.0, 11).unwrap();
        let split = BudgetSplit::symmetric(0.1).unwrap();
        let set = pp_quantile_na(&l, &u, 0.999, split, &grid).unwrap();
        if set.is_empty_warning() {
            return;
        }
        let retained = set.retained_scalars().unwrap();
        assert!(retained.contains(&1.0), "top grid point missing: {retained:?}");
        assert!(!retained.contains(&0.0), "bottom grid point retained: {retained:?}");
    }

    #[test]
    fn logistic_na_halving_delta_never_shrinks_rectifier() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![if i % 2 == 0 { -1.0 } else { 1.0 }]).collect();
        let y: Vec<f64> = (0..16).map(|i| ((i % 3) == 0) as i32 as f64).collect();
        let f: Vec<f64> = y.iter().map(|&v| (v * 0.8 + 0.1).clamp(0.0, 1.0)).collect();
        let l = LabeledSet::new(Some(x), y, f).unwrap();
        let samples: Vec<f64> = (0..l.len())
            .map(|i| l.features().unwrap()[i][0] * (l.predictions()[i] - l.outcomes()[i]))
            .collect();
        let wide = wsr_mean_ci(&samples, &BettingConfig::new(0.025, -1.0, 1.0).unwrap()).unwrap();
        let narrow = wsr_mean_ci(&samples, &BettingConfig::new(0.05, -1.0, 1.0).unwrap()).unwrap();
        assert!(wide.width() >= narrow.width() - 1e-12);
    }

    #[test]
    fn minkowski_combiner_fixture() {
        let grid = GridSpec::linear(0.0, 2.0, 3).unwrap();
        let r = vec![
            Interval::new(-1.0, 1.0, 0.95).unwrap(),
            Interval::new(-1.0, 1.0, 0.95).unwrap(),
            Interval::new(0.0, 0.0, 0.95).unwrap(),
        ];
        let t = vec![
            Interval::new(2.0, 3.0, 0.95).unwrap(),
            Interval::new(-0.5, 0.5, 0.95).unwrap(),
            Interval::new(0.0, 0.0, 0.95).unwrap(),
        ];
        let set = combine_minkowski(&r, &t, &grid).unwrap();
        assert!(!set.contains_index(0)); // sum [1, 4] excludes 0
        assert!(set.contains_index(1));
        assert!(set.contains_index(2)); // degenerate identity case
    }

    #[test]
    fn minkowski_combiner_monotone_in_widths() {
        let grid = GridSpec::linear(0.0, 1.0, 2).unwrap();
        let r = vec![Interval::new(0.1, 0.2, 0.95).unwrap(); 2];
        let t = vec![Interval::new(-0.15, -0.05, 0.95).unwrap(); 2];
        let set = combine_minkowski(&r, &t, &grid).unwrap();
        let r_wide = vec![Interval::new(0.0, 0.3, 0.95).unwrap(); 2];
        let wide = combine_minkowski(&r_wide, &t, &grid).unwrap();
        for idx in &set.retained {
            assert!(wide.contains_index(*idx));
        }
    }
}
