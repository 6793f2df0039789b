//! P-values by confidence-interval inversion.
//!
//! The p-value for H0: theta* in Theta0 is the smallest level alpha at which
//! every null point falls outside the level-alpha confidence set. The sets
//! here are nested in alpha by construction (their thresholds are monotone
//! normal quantiles), which is what makes the inversion super-uniform under
//! the null.

use crate::data::{EstimandKind, EstimandSpec, LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::estimators::{glm_rectifier, ols_center_se, GlmLink};
use crate::stats::{normal_cdf, SampleMoments};

/// Null hypothesis for a scalar estimand (or a single coefficient).
#[derive(Debug, Clone, PartialEq)]
pub enum NullSpec {
    Point(f64),
    /// H0: theta* <= c.
    LessEq(f64),
    /// H0: theta* >= c.
    GreaterEq(f64),
    Finite(Vec<f64>),
}

/// A p-value plus the resolution it was computed to: 0 for the closed-form
/// estimands, the bisection tolerance for gridded ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub value: f64,
    pub tolerance: f64,
}

const GRID_TOLERANCE: f64 = 1e-4;

/// Prediction-powered p-value. Mean and OLS coordinates invert their
/// closed-form interval widths analytically; quantile and (one-dimensional)
/// logistic nulls are resolved by bisection over alpha to 1e-4.
pub fn pp_p_value(
    estimand: &EstimandSpec,
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    null: &NullSpec,
) -> Result<PValue> {
    match estimand.kind {
        EstimandKind::Mean => {
            let rect = SampleMoments::from_samples(&labeled.prediction_errors())?;
            let imputed = SampleMoments::from_samples(unlabeled.predictions())?;
            let center = imputed.mean - rect.mean;
            let se = (rect.variance / rect.n as f64 + imputed.variance / imputed.n as f64)
                .sqrt();
            Ok(PValue { value: closed_form_p(center, se, null), tolerance: 0.0 })
        }
        EstimandKind::Ols(j_star) => {
            let (center, se) = ols_center_se(labeled, unlabeled, j_star)?;
            Ok(PValue { value: closed_form_p(center, se, null), tolerance: 0.0 })
        }
        EstimandKind::Quantile(q) => quantile_p(labeled, unlabeled, q, null),
        EstimandKind::Logistic => logistic_p(labeled, unlabeled, null),
        _ => Err(Error::domain(format!(
            "p-values support mean, quantile, logistic, and ols estimands; got {}",
            estimand.kind
        ))),
    }
}

/// Two-sided tail of the standardized distance from the estimate to the
/// nearest null point.
fn closed_form_p(center: f64, se: f64, null: &NullSpec) -> f64 {
    let single = |theta0: f64| -> f64 {
        if se == 0.0 {
            return if theta0 == center { 1.0 } else { 0.0 };
        }
        2.0 * (1.0 - normal_cdf((theta0 - center).abs() / se))
    };
    match null {
        NullSpec::Point(t) => single(*t),
        NullSpec::Finite(set) => set.iter().map(|&t| single(t)).fold(0.0, f64::max),
        NullSpec::LessEq(c) => {
            if center <= *c {
                1.0
            } else {
                single(*c)
            }
        }
        NullSpec::GreaterEq(c) => {
            if center >= *c {
                1.0
            } else {
                single(*c)
            }
        }
    }
}

/// p = inf{alpha : excluded(alpha)} for a predicate monotone in alpha,
/// located by bisection to `GRID_TOLERANCE`.
fn bisect_alpha(excluded: impl Fn(f64) -> Result<bool>) -> Result<PValue> {
    let hi_probe = 1.0 - 1e-9;
    if !excluded(hi_probe)? {
        return Ok(PValue { value: 1.0, tolerance: GRID_TOLERANCE });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > GRID_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if excluded(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PValue { value: hi, tolerance: GRID_TOLERANCE })
}

/// Null candidates for piecewise-constant scalar statistics: the statistic
/// only changes at observed data values, so the supremum over a one-sided
/// null is attained on the boundary point or a data value inside the null.
fn scalar_null_candidates(null: &NullSpec, data_values: &[f64]) -> Vec<f64> {
    match null {
        NullSpec::Point(t) => vec![*t],
        NullSpec::Finite(set) => set.clone(),
        NullSpec::LessEq(c) => {
            let mut v: Vec<f64> =
                data_values.iter().cloned().filter(|&t| t <= *c).collect();
            v.push(*c);
            v
        }
        NullSpec::GreaterEq(c) => {
            let mut v: Vec<f64> =
                data_values.iter().cloned().filter(|&t| t >= *c).collect();
            v.push(*c);
            v
        }
    }
}

fn quantile_p(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    q: f64,
    null: &NullSpec,
) -> Result<PValue> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    let mut data: Vec<f64> = labeled.outcomes().to_vec();
    data.extend_from_slice(labeled.predictions());
    data.extend_from_slice(unlabeled.predictions());
    let candidates = scalar_null_candidates(null, &data);
    let n = labeled.len() as f64;
    let big_n = unlabeled.len() as f64;

    // frozen per-candidate statistic and spread
    let stats: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&theta| {
            let (mut pos, mut neg) = (0usize, 0usize);
            for i in 0..labeled.len() {
                let dy = (labeled.outcomes()[i] <= theta) as i32;
                let df = (labeled.predictions()[i] <= theta) as i32;
                match dy - df {
                    1 => pos += 1,
                    -1 => neg += 1,
                    _ => {}
                }
            }
            let rect = (pos as f64 - neg as f64) / n;
            let zero = labeled.len() - pos - neg;
            let var_rect = (pos as f64 * (1.0 - rect) * (1.0 - rect)
                + neg as f64 * (1.0 + rect) * (1.0 + rect)
                + zero as f64 * rect * rect)
                / n;
            let cdf = unlabeled.predictions().iter().filter(|&&f| f <= theta).count() as f64
                / big_n;
            let stat = (cdf + rect - q).abs();
            let spread = (var_rect / n + cdf * (1.0 - cdf) / big_n).sqrt();
            (stat, spread)
        })
        .collect();

    bisect_alpha(move |alpha| {
        let z = crate::stats::normal_quantile(1.0 - alpha / 2.0)?;
        Ok(stats.iter().all(|&(stat, spread)| stat > z * spread))
    })
}

fn logistic_p(labeled: &LabeledSet, unlabeled: &UnlabeledSet, null: &NullSpec) -> Result<PValue> {
    let xs = unlabeled.require_features("logistic p-value")?;
    labeled.require_features("logistic p-value")?;
    let d = labeled.dim();
    if d != 1 {
        return Err(Error::domain(
            "logistic p-values are supported for one-dimensional coefficients; \
             evaluate set membership directly for multivariate nulls",
        ));
    }
    let candidates = match null {
        NullSpec::Point(t) => vec![*t],
        NullSpec::Finite(set) => set.clone(),
        _ => {
            return Err(Error::domain(
                "one-sided logistic nulls are not supported; supply a finite set \
                 of coefficient values",
            ))
        }
    };
    let rect = glm_rectifier(labeled)?;
    let n = rect.n as f64;
    let big_n = unlabeled.len() as f64;
    let preds = unlabeled.predictions();
    let stats: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&theta| {
            let vals: Vec<f64> = (0..xs.len())
                .map(|i| xs[i][0] * (GlmLink::Logistic.mean(xs[i][0] * theta) - preds[i]))
                .collect();
            let m = SampleMoments::from_samples(&vals).expect("finite gradient values");
            let stat = (m.mean + rect.value[0]).abs();
            let spread = (rect.variance[0] / n + m.variance / big_n).sqrt();
            (stat, spread)
        })
        .collect();

    bisect_alpha(move |alpha| {
        let z = crate::stats::normal_quantile(1.0 - alpha / 2.0)?;
        Ok(stats.iter().all(|&(stat, spread)| stat > z * spread))
    })
}
