//! Asymptotic prediction-powered estimators.
//!
//! Each estimator corrects the imputed estimate (computed from predictions on
//! the unlabeled data) with an empirical rectifier (the bias of the imputed
//! subgradient, estimated on labeled data), then sizes the confidence set by
//! a normal approximation combining both sampling fluctuations:
//!
//! - mean: closed-form interval around `mean f(X~) - mean(f(X) - Y)`;
//! - quantile: grid set retaining theta with `|F(theta) + rect - q| <= w`;
//! - logistic / Poisson regression: grid set with per-coordinate thresholds
//!   at level `alpha / d` (Bonferroni);
//! - OLS: closed-form interval per coordinate with sandwich variances;
//! - general convex losses: the gridded recipe for any subgradient.
//!
//! The rectified point estimate minimizes the rectified loss and always lies
//! inside the corresponding confidence set when it lies on the grid.

use nalgebra::{DMatrix, DVector};

use crate::data::{LabeledSet, UnlabeledSet};
use crate::error::{Error, Result};
use crate::grid::{GridAxis, GridSet, GridSpec};
use crate::stats::{check_alpha, normal_quantile, Interval, SampleMoments};

/// A subgradient of a convex loss, evaluated coordinatewise.
///
/// The feature slice is empty for featureless estimands (mean, quantile).
pub struct GradientSpec {
    pub dimension: usize,
    evaluate: Box<dyn Fn(&[f64], &[f64], f64) -> Vec<f64> + Sync + Send>,
}

impl GradientSpec {
    pub fn new(
        dimension: usize,
        evaluate: impl Fn(&[f64], &[f64], f64) -> Vec<f64> + Sync + Send + 'static,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("gradient dimension must be at least 1"));
        }
        Ok(GradientSpec { dimension, evaluate: Box::new(evaluate) })
    }

    pub fn evaluate(&self, theta: &[f64], x: &[f64], y: f64) -> Vec<f64> {
        (self.evaluate)(theta, x, y)
    }

    /// Squared-loss gradient g(theta, y) = theta - y; its minimizer is the mean.
    pub fn squared() -> Self {
        GradientSpec {
            dimension: 1,
            evaluate: Box::new(|theta, _x, y| vec![theta[0] - y]),
        }
    }

    /// Pinball (quantile) subgradient g(theta, y) = -q + 1{y <= theta}.
    pub fn pinball(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
        }
        Ok(GradientSpec {
            dimension: 1,
            evaluate: Box::new(move |theta, _x, y| {
                vec![-q + if y <= theta[0] { 1.0 } else { 0.0 }]
            }),
        })
    }
}

/// Empirical rectifier with its per-coordinate variance.
#[derive(Debug, Clone, PartialEq)]
pub struct RectifierEstimate {
    pub value: Vec<f64>,
    pub variance: Vec<f64>,
    pub n: usize,
}

/// GLM rectifier (constant in theta): per coordinate, the mean and variance
/// of X_j (f(X) - Y) over the labeled data.
pub fn glm_rectifier(labeled: &LabeledSet) -> Result<RectifierEstimate> {
    let x = labeled.require_features("GLM rectifier")?;
    let n = labeled.len();
    let d = labeled.dim();
    let mut value = vec![0.0; d];
    let mut variance = vec![0.0; d];
    for j in 0..d {
        let vals: Vec<f64> = (0..n)
            .map(|i| x[i][j] * (labeled.predictions()[i] - labeled.outcomes()[i]))
            .collect();
        let m = SampleMoments::from_samples(&vals)?;
        value[j] = m.mean;
        variance[j] = m.variance;
    }
    Ok(RectifierEstimate { value, variance, n })
}

// --- mean ---------------------------------------------------------------------

/// Prediction-powered mean interval.
pub fn pp_mean(labeled: &LabeledSet, unlabeled: &UnlabeledSet, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    let rect = SampleMoments::from_samples(&labeled.prediction_errors())?;
    let imputed = SampleMoments::from_samples(unlabeled.predictions())?;
    let estimate = imputed.mean - rect.mean;
    let half = normal_quantile(1.0 - alpha / 2.0)?
        * (rect.variance / rect.n as f64 + imputed.variance / imputed.n as f64).sqrt();
    if half == 0.0 {
        return Interval::degenerate_at(estimate, 1.0 - alpha);
    }
    Interval::new(estimate - half, estimate + half, 1.0 - alpha)
}

// --- quantile -------------------------------------------------------------------

/// Prediction-powered quantile set: retains grid points theta with
/// `|F(theta) + rectifier(theta) - q| <= w_alpha(theta)`.
///
/// The grid must span the range of the unlabeled predictions. Indicators use
/// `<=` exactly; point masses are not smoothed.
pub fn pp_quantile(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    q: f64,
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    check_alpha(alpha)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    if grid.dim() != 1 {
        return Err(Error::domain("quantile estimation uses a 1-d grid"));
    }
    let preds = unlabeled.predictions();
    let lo = preds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = preds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let axis = &grid.axes[0];
    if axis.low > lo || axis.high < hi {
        return Err(Error::domain(format!(
            "grid [{}, {}] must span the unlabeled predictions [{lo}, {hi}]",
            axis.low, axis.high
        )));
    }
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let n = labeled.len() as f64;
    let big_n = preds.len() as f64;
    let mut retained = Vec::new();
    for idx in 0..grid.len() {
        let theta = axis.point(idx);
        // rectifier values live in {-1, 0, 1}; count instead of buffering
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
        let below = preds.iter().filter(|&&f| f <= theta).count() as f64;
        let cdf = below / big_n;
        let var_cdf = cdf * (1.0 - cdf);
        let w = z * (var_rect / n + var_cdf / big_n).sqrt();
        if (cdf + rect - q).abs() <= w {
            retained.push(idx);
        }
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

// --- generalized linear models ----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GlmLink {
    Logistic,
    Poisson,
}

impl GlmLink {
    /// Predicted mean for linear predictor `eta = x . theta`.
    pub fn mean(&self, eta: f64) -> f64 {
        match self {
            GlmLink::Logistic => 1.0 / (1.0 + (-eta).exp()),
            GlmLink::Poisson => eta.exp(),
        }
    }

    /// Derivative of the mean in eta; the per-observation Hessian weight.
    fn mean_derivative(&self, eta: f64) -> f64 {
        match self {
            GlmLink::Logistic => {
                let mu = self.mean(eta);
                mu * (1.0 - mu)
            }
            GlmLink::Poisson => eta.exp(),
        }
    }

    fn validate(&self, labeled: &LabeledSet, unlabeled: &UnlabeledSet) -> Result<()> {
        match self {
            GlmLink::Logistic => {
                let in_unit = |v: &f64| (0.0..=1.0).contains(v);
                if !labeled.outcomes().iter().all(in_unit)
                    || !labeled.predictions().iter().all(in_unit)
                    || !unlabeled.predictions().iter().all(in_unit)
                {
                    return Err(Error::domain(
                        "logistic regression requires outcomes and predictions in [0, 1]",
                    ));
                }
            }
            GlmLink::Poisson => {
                if labeled.outcomes().iter().any(|&v| v < 0.0)
                    || labeled.predictions().iter().any(|&v| v < 0.0)
                    || unlabeled.predictions().iter().any(|&v| v < 0.0)
                {
                    return Err(Error::domain(
                        "Poisson regression requires nonnegative outcomes and predictions",
                    ));
                }
            }
        }
        Ok(())
    }
}

fn dot(x: &[f64], theta: &[f64]) -> f64 {
    x.iter().zip(theta).map(|(a, b)| a * b).sum()
}

fn glm_set(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    alpha: f64,
    grid: &GridSpec,
    link: GlmLink,
) -> Result<GridSet> {
    check_alpha(alpha)?;
    link.validate(labeled, unlabeled)?;
    let xs = unlabeled.require_features("GLM estimation")?;
    labeled.require_features("GLM estimation")?;
    let d = labeled.dim();
    if unlabeled.dim() != d {
        return Err(Error::domain("labeled and unlabeled feature dimensions differ"));
    }
    if grid.dim() != d {
        return Err(Error::domain(format!(
            "grid dimension {} does not match feature dimension {d}",
            grid.dim()
        )));
    }
    let rect = glm_rectifier(labeled)?;
    let z = normal_quantile(1.0 - alpha / (2.0 * d as f64))?;
    let n = rect.n as f64;
    let big_n = unlabeled.len() as f64;
    let preds = unlabeled.predictions();

    let mut retained = Vec::new();
    let mut vals = vec![0.0; unlabeled.len()];
    'grid: for idx in 0..grid.len() {
        let theta = grid.point(idx);
        for j in 0..d {
            for i in 0..unlabeled.len() {
                vals[i] = xs[i][j] * (link.mean(dot(&xs[i], &theta)) - preds[i]);
            }
            let mean = vals.iter().sum::<f64>() / big_n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / big_n;
            let w = z * (rect.variance[j] / n + var / big_n).sqrt();
            if (mean + rect.value[j]).abs() > w {
                continue 'grid;
            }
        }
        retained.push(idx);
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

/// Prediction-powered logistic regression set with per-coordinate
/// Bonferroni thresholds.
pub fn pp_logistic(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    glm_set(labeled, unlabeled, alpha, grid, GlmLink::Logistic)
}

/// Prediction-powered Poisson regression set; identical to the logistic
/// pipeline with the exponential mean predictor.
pub fn pp_poisson(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    glm_set(labeled, unlabeled, alpha, grid, GlmLink::Poisson)
}

// --- linear regression --------------------------------------------------------

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let (n, d) = (rows.len(), rows[0].len());
    DMatrix::from_fn(n, d, |i, j| rows[i][j])
}

/// Least-squares solve through a rank-revealing SVD. Rank deficiency (any
/// singular value below max(n, d) * eps * sigma_max) is an error rather than
/// a silent minimum-norm solve.
fn pinv_solve(x: &DMatrix<f64>, b: &DVector<f64>, name: &str) -> Result<DVector<f64>> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = x.nrows().max(x.ncols()) as f64 * f64::EPSILON * smax;
    if svd.singular_values.iter().any(|&s| s <= tol) {
        return Err(Error::Linalg(format!(
            "design matrix {name} is rank deficient (singular value below {tol:.3e})"
        )));
    }
    svd.solve(b, tol).map_err(|e| Error::Linalg(format!("SVD solve on {name}: {e}")))
}

/// Full pseudoinverse (d x n) with the same rank policy as [`pinv_solve`].
pub(crate) fn pinv_matrix(x: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = x.nrows().max(x.ncols()) as f64 * f64::EPSILON * smax;
    if svd.singular_values.iter().any(|&s| s <= tol) {
        return Err(Error::Linalg(format!(
            "design matrix {name} is rank deficient (singular value below {tol:.3e})"
        )));
    }
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let mut sigma_inv = DMatrix::zeros(v_t.nrows(), u.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        sigma_inv[(i, i)] = 1.0 / s;
    }
    Ok(v_t.transpose() * sigma_inv * u.transpose())
}

fn sandwich(
    x: &DMatrix<f64>,
    residuals: &DVector<f64>,
    name: &str,
) -> Result<DMatrix<f64>> {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let sigma = x.transpose() * x / n;
    let mut meat = DMatrix::zeros(d, d);
    for i in 0..x.nrows() {
        let xi = x.row(i).transpose();
        let r2 = residuals[i] * residuals[i];
        meat += r2 * &xi * xi.transpose();
    }
    meat /= n;
    let sigma_inv = sigma.clone().try_inverse().ok_or_else(|| {
        Error::Linalg(format!("Gram matrix of {name} is singular"))
    })?;
    Ok(&sigma_inv * meat * &sigma_inv)
}

/// Point estimate and standard error for one OLS coordinate; shared by the
/// interval and p-value paths.
pub(crate) fn ols_center_se(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    j_star: usize,
) -> Result<(f64, f64)> {
    let xl = labeled.require_features("OLS")?;
    let xu = unlabeled.require_features("OLS")?;
    let d = labeled.dim();
    if unlabeled.dim() != d {
        return Err(Error::domain("labeled and unlabeled feature dimensions differ"));
    }
    if j_star >= d {
        return Err(Error::domain(format!("coefficient {j_star} out of range for d = {d}")));
    }
    if labeled.len() <= d || unlabeled.len() <= d {
        return Err(Error::domain("OLS requires more rows than features on both datasets"));
    }
    let x = to_matrix(xl);
    let xt = to_matrix(xu);
    let f_unlabeled = DVector::from_column_slice(unlabeled.predictions());
    let errors = DVector::from_vec(labeled.prediction_errors());

    let theta_f = pinv_solve(&xt, &f_unlabeled, "unlabeled design")?;
    let rect = pinv_solve(&x, &errors, "labeled design")?;
    let estimate = &theta_f - &rect;

    let resid_unlabeled = &f_unlabeled - &xt * &theta_f;
    let v_unlabeled = sandwich(&xt, &resid_unlabeled, "unlabeled design")?;
    let resid_labeled = &errors - &x * &rect;
    let v_labeled = sandwich(&x, &resid_labeled, "labeled design")?;

    let n = labeled.len() as f64;
    let big_n = unlabeled.len() as f64;
    let se =
        (v_labeled[(j_star, j_star)] / n + v_unlabeled[(j_star, j_star)] / big_n).sqrt();
    Ok((estimate[j_star], se))
}

/// Prediction-powered OLS interval for coefficient `j_star`, with sandwich
/// variance estimates on both the rectifier and the imputed fit.
pub fn pp_ols(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    j_star: usize,
    alpha: f64,
) -> Result<Interval> {
    check_alpha(alpha)?;
    let (center, se) = ols_center_se(labeled, unlabeled, j_star)?;
    let half = normal_quantile(1.0 - alpha / 2.0)? * se;
    if half == 0.0 {
        return Interval::degenerate_at(center, 1.0 - alpha);
    }
    Interval::new(center - half, center + half, 1.0 - alpha)
}

// --- general convex estimation ---------------------------------------------------

/// Prediction-powered confidence set for the minimizer of an arbitrary
/// subdifferentiable convex loss: per-coordinate membership
/// `|g_j(theta) + rect_j(theta)| <= w_j(theta)` with the error budget split
/// evenly over coordinates.
pub fn pp_convex(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    gradient: &GradientSpec,
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    check_alpha(alpha)?;
    let p = gradient.dimension;
    if grid.dim() != p {
        return Err(Error::domain(format!(
            "grid dimension {} does not match gradient dimension {p}",
            grid.dim()
        )));
    }
    let z = normal_quantile(1.0 - alpha / (2.0 * p as f64))?;
    let n = labeled.len();
    let big_n = unlabeled.len();
    let empty: [f64; 0] = [];
    let lx = |i: usize| -> &[f64] {
        labeled.features().map(|f| f[i].as_slice()).unwrap_or(&empty)
    };
    let ux = |i: usize| -> &[f64] {
        unlabeled.features().map(|f| f[i].as_slice()).unwrap_or(&empty)
    };

    let mut rect_vals = vec![vec![0.0; n]; p];
    let mut grad_vals = vec![vec![0.0; big_n]; p];
    let mut retained = Vec::new();
    'grid: for idx in 0..grid.len() {
        let theta = grid.point(idx);
        for i in 0..n {
            let gy = gradient.evaluate(&theta, lx(i), labeled.outcomes()[i]);
            let gf = gradient.evaluate(&theta, lx(i), labeled.predictions()[i]);
            for j in 0..p {
                rect_vals[j][i] = gy[j] - gf[j];
            }
        }
        for i in 0..big_n {
            let gf = gradient.evaluate(&theta, ux(i), unlabeled.predictions()[i]);
            for j in 0..p {
                grad_vals[j][i] = gf[j];
            }
        }
        for j in 0..p {
            let rect = SampleMoments::from_samples(&rect_vals[j])?;
            let imputed = SampleMoments::from_samples(&grad_vals[j])?;
            let w = z * (rect.variance / n as f64 + imputed.variance / big_n as f64).sqrt();
            if (imputed.mean + rect.mean).abs() > w {
                continue 'grid;
            }
        }
        retained.push(idx);
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

// --- rectified point estimate ----------------------------------------------------

/// Loss whose rectified empirical version is minimized by
/// [`pp_point_estimate`]. Mean and OLS have closed forms, the GLMs use
/// damped Newton, and arbitrary one-dimensional losses are minimized by a
/// scan plus golden-section refinement over `[low, high]`.
pub enum PointLoss {
    Mean,
    Ols,
    Glm(GlmLink),
    Scalar {
        evaluate: Box<dyn Fn(f64, &[f64], f64) -> f64 + Sync + Send>,
        low: f64,
        high: f64,
    },
}

/// Minimizer of the rectified loss
/// `mean loss(theta; unlabeled, f) + mean(loss(theta; y) - loss(theta; f))`.
///
/// For the gradient-based losses the returned point satisfies
/// `imputed gradient + rectifier = 0` to within 1e-8.
pub fn pp_point_estimate(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    loss: &PointLoss,
) -> Result<Vec<f64>> {
    match loss {
        PointLoss::Mean => {
            let rect = SampleMoments::from_samples(&labeled.prediction_errors())?;
            let imputed = SampleMoments::from_samples(unlabeled.predictions())?;
            Ok(vec![imputed.mean - rect.mean])
        }
        PointLoss::Ols => {
            let x = to_matrix(labeled.require_features("OLS point estimate")?);
            let xt = to_matrix(unlabeled.require_features("OLS point estimate")?);
            let theta_f = pinv_solve(
                &xt,
                &DVector::from_column_slice(unlabeled.predictions()),
                "unlabeled design",
            )?;
            let rect = pinv_solve(
                &x,
                &DVector::from_vec(labeled.prediction_errors()),
                "labeled design",
            )?;
            Ok((theta_f - rect).iter().cloned().collect())
        }
        PointLoss::Glm(link) => glm_point_estimate(labeled, unlabeled, *link),
        PointLoss::Scalar { evaluate, low, high } => {
            let objective = |theta: f64| rectified_scalar_loss(labeled, unlabeled, evaluate, theta);
            Ok(vec![minimize_scalar(objective, *low, *high)])
        }
    }
}

fn rectified_scalar_loss(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    loss: &(dyn Fn(f64, &[f64], f64) -> f64 + Sync + Send),
    theta: f64,
) -> f64 {
    let empty: [f64; 0] = [];
    let lx = |i: usize| -> &[f64] {
        labeled.features().map(|f| f[i].as_slice()).unwrap_or(&empty)
    };
    let ux = |i: usize| -> &[f64] {
        unlabeled.features().map(|f| f[i].as_slice()).unwrap_or(&empty)
    };
    let imputed: f64 = (0..unlabeled.len())
        .map(|i| loss(theta, ux(i), unlabeled.predictions()[i]))
        .sum::<f64>()
        / unlabeled.len() as f64;
    let correction: f64 = (0..labeled.len())
        .map(|i| {
            loss(theta, lx(i), labeled.outcomes()[i]) - loss(theta, lx(i), labeled.predictions()[i])
        })
        .sum::<f64>()
        / labeled.len() as f64;
    imputed + correction
}

/// Coarse scan followed by golden-section refinement inside the best cell.
/// The scan guards against the mild nonconvexity the labeled correction can
/// introduce into the rectified loss.
fn minimize_scalar(objective: impl Fn(f64) -> f64, low: f64, high: f64) -> f64 {
    const SCAN: usize = 512;
    let step = (high - low) / SCAN as f64;
    let mut best = (low, objective(low));
    for i in 1..=SCAN {
        let t = low + step * i as f64;
        let v = objective(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(low), (best.0 + step).min(high));
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > 1e-10 * (1.0 + high.abs().max(low.abs())) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    0.5 * (a + b)
}

fn glm_point_estimate(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    link: GlmLink,
) -> Result<Vec<f64>> {
    link.validate(labeled, unlabeled)?;
    let xs = unlabeled.require_features("GLM point estimate")?;
    labeled.require_features("GLM point estimate")?;
    let d = labeled.dim();
    if unlabeled.dim() != d {
        return Err(Error::domain("labeled and unlabeled feature dimensions differ"));
    }
    let rect = glm_rectifier(labeled)?;
    let big_n = unlabeled.len() as f64;
    let preds = unlabeled.predictions();

    // gradient of the rectified loss: imputed gradient + rectifier.
    // The labeled Hessian terms cancel exactly (they do not depend on y),
    // so Newton steps use the unlabeled curvature alone.
    let grad_at = |theta: &DVector<f64>| -> DVector<f64> {
        let mut g = DVector::from_column_slice(&rect.value);
        for i in 0..xs.len() {
            let eta = xs[i].iter().zip(theta.iter()).map(|(a, b)| a * b).sum::<f64>();
            let scale = (link.mean(eta) - preds[i]) / big_n;
            for j in 0..d {
                g[j] += scale * xs[i][j];
            }
        }
        g
    };
    let hess_at = |theta: &DVector<f64>| -> DMatrix<f64> {
        let mut h = DMatrix::zeros(d, d);
        for i in 0..xs.len() {
            let eta = xs[i].iter().zip(theta.iter()).map(|(a, b)| a * b).sum::<f64>();
            let wmat = link.mean_derivative(eta) / big_n;
            for a in 0..d {
                for b in 0..d {
                    h[(a, b)] += wmat * xs[i][a] * xs[i][b];
                }
            }
        }
        h
    };

    let mut theta = DVector::zeros(d);
    let mut grad = grad_at(&theta);
    const TOL: f64 = 1e-8;
    for _ in 0..200 {
        let gnorm = grad.amax();
        if gnorm <= TOL {
            if link == GlmLink::Logistic {
                // a vanishing gradient with every observation saturated is
                // the signature of separation: the minimizer is at infinity
                let max_weight = xs
                    .iter()
                    .map(|xi| {
                        let eta =
                            xi.iter().zip(theta.iter()).map(|(a, b)| a * b).sum::<f64>();
                        link.mean_derivative(eta)
                    })
                    .fold(0.0, f64::max);
                if max_weight < 1e-6 {
                    return Err(Error::Numerical(format!(
                        "logistic fit is separable: every observation saturated at \
                         gradient norm {gnorm:.3e}; no finite minimizer"
                    )));
                }
            }
            return Ok(theta.iter().cloned().collect());
        }
        let hess = hess_at(&theta);
        let step = hess.lu().solve(&grad).ok_or_else(|| {
            Error::Numerical(format!(
                "singular Hessian in GLM point estimate (gradient norm {gnorm:.3e})"
            ))
        })?;
        // damping: halve until the gradient norm decreases
        let mut tau = 1.0;
        let mut advanced = false;
        while tau > 1e-12 {
            let candidate = &theta - tau * &step;
            let g_new = grad_at(&candidate);
            if g_new.norm() < grad.norm() * (1.0 - 1e-4 * tau) {
                theta = candidate;
                grad = g_new;
                advanced = true;
                break;
            }
            tau *= 0.5;
        }
        if !advanced {
            return Err(Error::Numerical(format!(
                "GLM point estimate stalled; gradient norm {:.6e}",
                grad.amax()
            )));
        }
    }
    Err(Error::Numerical(format!(
        "GLM point estimate did not converge after 200 iterations; gradient norm {:.6e}",
        grad.amax()
    )))
}

// --- default grids -----------------------------------------------------------------

/// Default lattice for GLM confidence sets: centered at the rectified point
/// estimate with per-coordinate extent +/- 6 estimated standard errors.
/// Exhaustive lattices are capped at 3 coordinates; use
/// [`glm_profile_sets`] beyond that.
pub fn default_glm_grid(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    link: GlmLink,
    resolution: usize,
) -> Result<GridSpec> {
    let d = labeled.dim();
    if d > 3 {
        return Err(Error::domain(
            "exhaustive lattices are limited to 3 coordinates; use profile sets",
        ));
    }
    let center = glm_point_estimate(labeled, unlabeled, link)?;
    let se = glm_standard_errors(labeled, unlabeled, link, &center)?;
    let axes = (0..d)
        .map(|j| {
            let half = 6.0 * se[j].max(1e-6);
            GridAxis::new(center[j] - half, center[j] + half, resolution)
        })
        .collect::<Result<Vec<_>>>()?;
    GridSpec::new(axes)
}

/// Parameter-scale standard errors at `theta` by the sandwich transform:
/// the score covariance (rectifier plus imputed-gradient pieces) mapped
/// through the inverse curvature of the rectified loss.
fn glm_standard_errors(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    link: GlmLink,
    theta: &[f64],
) -> Result<Vec<f64>> {
    let xl = labeled.require_features("GLM standard errors")?;
    let xs = unlabeled.require_features("GLM standard errors")?;
    let preds = unlabeled.predictions();
    let n = labeled.len() as f64;
    let big_n = unlabeled.len() as f64;
    let d = labeled.dim();

    let covariance = |rows: &mut dyn Iterator<Item = Vec<f64>>, count: f64| -> DMatrix<f64> {
        let mut sum = vec![0.0; d];
        let mut outer: DMatrix<f64> = DMatrix::zeros(d, d);
        let mut values: Vec<Vec<f64>> = Vec::new();
        for v in rows {
            for j in 0..d {
                sum[j] += v[j];
            }
            values.push(v);
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
        for v in &values {
            for a in 0..d {
                for b in 0..d {
                    outer[(a, b)] += (v[a] - mean[a]) * (v[b] - mean[b]);
                }
            }
        }
        outer / count
    };

    let mut rect_rows = (0..xl.len()).map(|i| {
        let err = labeled.predictions()[i] - labeled.outcomes()[i];
        (0..d).map(|j| xl[i][j] * err).collect::<Vec<f64>>()
    });
    let rect_cov = covariance(&mut rect_rows, n);
    let mut grad_rows = (0..xs.len()).map(|i| {
        let mu = link.mean(dot(&xs[i], theta));
        (0..d).map(|j| xs[i][j] * (mu - preds[i])).collect::<Vec<f64>>()
    });
    let grad_cov = covariance(&mut grad_rows, big_n);
    let score_cov = rect_cov / n + grad_cov / big_n;

    let mut hess: DMatrix<f64> = DMatrix::zeros(d, d);
    for row in xs {
        let w = link.mean_derivative(dot(row, theta)) / big_n;
        for a in 0..d {
            for b in 0..d {
                hess[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    let hess_inv = hess
        .try_inverse()
        .ok_or_else(|| Error::Linalg("singular curvature in GLM standard errors".into()))?;
    let sandwich: DMatrix<f64> = &hess_inv * score_cov * &hess_inv;
    Ok((0..d).map(|j| sandwich[(j, j)].max(0.0).sqrt()).collect())
}

/// Per-coordinate profile sets for d > 3: coordinate j varies along its own
/// axis while the others stay pinned at the rectified point estimate. A
/// practical device for high-dimensional fits, not a joint confidence
/// region.
pub fn glm_profile_sets(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    alpha: f64,
    link: GlmLink,
    resolution: usize,
) -> Result<Vec<GridSet>> {
    check_alpha(alpha)?;
    link.validate(labeled, unlabeled)?;
    let xs = unlabeled.require_features("GLM profile sets")?;
    let d = labeled.dim();
    let center = glm_point_estimate(labeled, unlabeled, link)?;
    let se = glm_standard_errors(labeled, unlabeled, link, &center)?;
    let rect = glm_rectifier(labeled)?;
    let z = normal_quantile(1.0 - alpha / (2.0 * d as f64))?;
    let n = rect.n as f64;
    let big_n = unlabeled.len() as f64;
    let preds = unlabeled.predictions();

    let mut out = Vec::with_capacity(d);
    for coord in 0..d {
        let half = 6.0 * se[coord].max(1e-6);
        let axis = GridAxis::new(center[coord] - half, center[coord] + half, resolution)?;
        let spec = GridSpec::new(vec![axis.clone()])?;
        let mut retained = Vec::new();
        let mut theta = center.clone();
        'point: for idx in 0..axis.resolution {
            theta[coord] = axis.point(idx);
            for j in 0..d {
                let vals: Vec<f64> = (0..xs.len())
                    .map(|i| xs[i][j] * (link.mean(dot(&xs[i], &theta)) - preds[i]))
                    .collect();
                let m = SampleMoments::from_samples(&vals)?;
                let w = z * (rect.variance[j] / n + m.variance / big_n).sqrt();
                if (m.mean + rect.value[j]).abs() > w {
                    continue 'point;
                }
            }
            retained.push(idx);
        }
        out.push(GridSet::new(spec, retained, 1.0 - alpha));
    }
    Ok(out)
}
