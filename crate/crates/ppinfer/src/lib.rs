//! Prediction-powered inference: statistically valid confidence intervals,
//! sets, and p-values that combine a small gold-standard dataset with
//! machine-learning predictions on a large unlabeled dataset.
//!
//! The central object is the *rectifier*: a measure of prediction error,
//! estimated on labeled data, that corrects the bias of the imputed estimate
//! computed from predictions alone. Every estimator here follows the same
//! recipe:
//!
//! 1. build a confidence set for the rectifier from the `n` labeled points,
//! 2. build a confidence set for the imputed quantity from the `N` unlabeled
//!    predictions,
//! 3. combine the two so the result covers the target with probability at
//!    least `1 - alpha`.
//!
//! # Module map
//!
//! - [`stats`] — normal quantiles, CLT mean intervals (i.i.d. and finite
//!   population), binomial CDF machinery, the DKWM radius.
//! - [`betting`] — variance-adaptive nonasymptotic mean confidence sets via
//!   test supermartingales, for i.i.d. and without-replacement sampling.
//! - [`data`] — labeled/unlabeled datasets, validation, CSV ingestion.
//! - [`estimators`] — asymptotic prediction-powered estimators: mean,
//!   quantile, logistic/Poisson regression, OLS with sandwich variances,
//!   general convex losses, and the rectified point estimate.
//! - [`nonasymptotic`] — finite-sample-valid counterparts built on the
//!   betting intervals, plus the generic Minkowski-sum combiner.
//! - [`riskmin`] — general (possibly nonconvex, constrained) risk
//!   minimization with data splitting, and the mode / Tukey biweight losses.
//! - [`shift`] — covariate-shift reweighting and label-shift inference via
//!   confusion-matrix inversion.
//! - [`finite_pop`] — inference on a fixed finite population with a
//!   uniformly sampled labeled subset.
//! - [`pvalue`], [`odds`] — p-values by interval inversion and the
//!   odds-ratio composite estimand.
//! - [`sim`], [`analysis`] — synthetic scenarios, Monte Carlo coverage
//!   runs, classical/imputation baselines, and report emission.
//!
//! Runnable examples for each capability live under `examples/`; the `ppi`
//! binary exposes the same operations as CLI subcommands.

pub mod analysis;
pub mod betting;
pub mod data;
pub mod error;
pub mod estimators;
pub mod finite_pop;
pub mod grid;
pub mod nonasymptotic;
pub mod odds;
pub mod pvalue;
pub mod riskmin;
pub mod shift;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use stats::{Interval, SampleMoments};
