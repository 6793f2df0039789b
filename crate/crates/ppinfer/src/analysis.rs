//! One-shot analysis of a labeled/unlabeled dataset pair: the
//! prediction-powered result next to the classical baseline (labeled data
//! only) and the imputation baseline (predictions treated as gold-standard).

use crate::data::{ConvexLoss, EstimandKind, EstimandSpec, LabeledSet, RiskLoss, UnlabeledSet};
use crate::error::{Error, Result};
use crate::estimators::{
    default_glm_grid, glm_profile_sets, pp_convex, pp_logistic, pp_mean, pp_ols, pp_poisson,
    pp_quantile, GlmLink, GradientSpec,
};
use crate::grid::{GridSet, GridSpec};
use crate::nonasymptotic::{pp_mean_na, pp_quantile_na, BudgetSplit};
use crate::riskmin::{discrete_mode_loss, hoeffding_width, mode_loss, pp_risk_min, tukey_loss, LossSpec, SplitPlan};
use crate::stats::{clt_mean_interval, normal_quantile, Interval, SampleMoments};

/// What one method produced: a closed-form interval or a retained grid set
/// summarized by its hull.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodOutcome {
    Interval(Interval),
    Set { hull: Option<(f64, f64)>, retained: usize, total: usize, level: f64 },
}

impl MethodOutcome {
    fn from_set(set: &GridSet) -> Result<Self> {
        Ok(MethodOutcome::Set {
            hull: set.hull_1d().ok().flatten(),
            retained: set.retained.len(),
            total: set.grid.len(),
            level: set.level,
        })
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        match self {
            MethodOutcome::Interval(iv) => Some((iv.lower, iv.upper)),
            MethodOutcome::Set { hull, .. } => *hull,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub name: &'static str,
    pub outcome: MethodOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub estimand: String,
    pub n: usize,
    pub big_n: usize,
    pub alpha: f64,
    pub methods: Vec<MethodReport>,
    /// Degeneracies, empty-set warnings, recorded seeds.
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn method(&self, name: &str) -> Option<&MethodOutcome> {
        self.methods.iter().find(|m| m.name == name).map(|m| &m.outcome)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "estimand: {}  n={} N={} alpha={}\n",
            self.estimand, self.n, self.big_n, self.alpha
        );
        for m in &self.methods {
            match &m.outcome {
                MethodOutcome::Interval(iv) => {
                    out.push_str(&format!(
                        "{:<11} [{:.6}, {:.6}] width={:.6}{}\n",
                        m.name,
                        iv.lower,
                        iv.upper,
                        iv.width(),
                        if iv.degenerate { " (degenerate)" } else { "" }
                    ));
                }
                MethodOutcome::Set { hull, retained, total, .. } => match hull {
                    Some((lo, hi)) => out.push_str(&format!(
                        "{:<11} hull [{:.6}, {:.6}] retained {retained}/{total}\n",
                        m.name, lo, hi
                    )),
                    None => out.push_str(&format!(
                        "{:<11} EMPTY SET (0/{total} grid points retained)\n",
                        m.name
                    )),
                },
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("method,estimand,n,N,alpha,lower,upper,width,retained,total\n");
        for m in &self.methods {
            let (lo, hi, width, retained, total) = match &m.outcome {
                MethodOutcome::Interval(iv) => (
                    format!("{:.6}", iv.lower),
                    format!("{:.6}", iv.upper),
                    format!("{:.6}", iv.width()),
                    String::new(),
                    String::new(),
                ),
                MethodOutcome::Set { hull, retained, total, .. } => match hull {
                    Some((lo, hi)) => (
                        format!("{lo:.6}"),
                        format!("{hi:.6}"),
                        format!("{:.6}", hi - lo),
                        retained.to_string(),
                        total.to_string(),
                    ),
                    None => (
                        String::new(),
                        String::new(),
                        String::new(),
                        retained.to_string(),
                        total.to_string(),
                    ),
                },
            };
            out.push_str(&format!(
                "{},{},{},{},{},{lo},{hi},{width},{retained},{total}\n",
                m.name, self.estimand, self.n, self.big_n, self.alpha
            ));
        }
        out
    }
}

/// One-sample estimating-equation set |mean g(theta)| <= z sd / sqrt(n):
/// the classical machinery applied to a single dataset, used for both
/// baselines of the gridded estimands.
fn score_band_set(
    gradient: &GradientSpec,
    features: Option<&[Vec<f64>]>,
    values: &[f64],
    alpha: f64,
    grid: &GridSpec,
) -> Result<GridSet> {
    let p = gradient.dimension;
    let z = normal_quantile(1.0 - alpha / (2.0 * p as f64))?;
    let n = values.len();
    static EMPTY: [f64; 0] = [];
    let row = |i: usize| -> &[f64] { features.map(|f| f[i].as_slice()).unwrap_or(&EMPTY) };
    let mut vals = vec![vec![0.0; n]; p];
    let mut retained = Vec::new();
    'grid: for idx in 0..grid.len() {
        let theta = grid.point(idx);
        for i in 0..n {
            let g = gradient.evaluate(&theta, row(i), values[i]);
            for j in 0..p {
                vals[j][i] = g[j];
            }
        }
        for coord in vals.iter().take(p) {
            let m = SampleMoments::from_samples(coord)?;
            if m.mean.abs() > z * (m.variance / n as f64).sqrt() {
                continue 'grid;
            }
        }
        retained.push(idx);
    }
    Ok(GridSet::new(grid.clone(), retained, 1.0 - alpha))
}

fn glm_gradient(link: GlmLink, d: usize) -> Result<GradientSpec> {
    GradientSpec::new(d, move |theta, x, y| {
        let eta: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
        let mu = link.mean(eta);
        x.iter().map(|&xj| xj * (mu - y)).collect()
    })
}

fn risk_loss_spec(loss: RiskLoss) -> Result<LossSpec> {
    match loss {
        RiskLoss::ModeDiscrete => discrete_mode_loss(),
        RiskLoss::Mode(eta) => mode_loss(eta),
        RiskLoss::Tukey(c) => tukey_loss(c),
    }
}

/// Seed for the risk-minimization split plan when the caller does not give
/// one; recorded in the report notes either way.
const DEFAULT_SPLIT_SEED: u64 = 20240801;

/// Compute the prediction-powered result plus classical and imputation
/// baselines for the given estimand.
pub fn run_analysis(
    labeled: &LabeledSet,
    unlabeled: &UnlabeledSet,
    estimand: &EstimandSpec,
    seed: Option<u64>,
) -> Result<AnalysisReport> {
    let alpha = estimand.alpha;
    let mut notes = Vec::new();
    let push_interval = |methods: &mut Vec<MethodReport>,
                             notes: &mut Vec<String>,
                             name: &'static str,
                             iv: Interval| {
        if iv.degenerate {
            notes.push(format!("{name}: zero estimated variance; point interval"));
        }
        methods.push(MethodReport { name, outcome: MethodOutcome::Interval(iv) });
    };
    let push_set = |methods: &mut Vec<MethodReport>,
                    notes: &mut Vec<String>,
                    name: &'static str,
                    set: &GridSet|
     -> Result<()> {
        if set.is_empty_warning() {
            notes.push(format!(
                "{name}: empty retained set at level {}; model and data may conflict",
                set.level
            ));
        }
        methods.push(MethodReport { name, outcome: MethodOutcome::from_set(set)? });
        Ok(())
    };

    let mut methods = Vec::new();
    match estimand.kind {
        EstimandKind::Mean => {
            let pp = match estimand.delta {
                Some(delta) => {
                    let bound = estimand.bound.ok_or_else(|| {
                        Error::domain("nonasymptotic mean estimation needs --bound")
                    })?;
                    pp_mean_na(labeled, unlabeled, BudgetSplit::new(alpha, delta)?, bound)?
                }
                None => pp_mean(labeled, unlabeled, alpha)?,
            };
            push_interval(&mut methods, &mut notes, "pp", pp);
            push_interval(
                &mut methods,
                &mut notes,
                "classical",
                clt_mean_interval(labeled.outcomes(), alpha)?,
            );
            push_interval(
                &mut methods,
                &mut notes,
                "imputation",
                clt_mean_interval(unlabeled.predictions(), alpha)?,
            );
        }
        EstimandKind::Quantile(q) => {
            let grid = GridSpec::spanning(unlabeled.predictions(), 1000)?;
            let pp = match estimand.delta {
                Some(delta) => {
                    pp_quantile_na(labeled, unlabeled, q, BudgetSplit::new(alpha, delta)?, &grid)?
                }
                None => pp_quantile(labeled, unlabeled, q, alpha, &grid)?,
            };
            push_set(&mut methods, &mut notes, "pp", &pp)?;
            let pinball = GradientSpec::pinball(q)?;
            let classical_grid = GridSpec::spanning(labeled.outcomes(), 1000)?;
            let classical =
                score_band_set(&pinball, None, labeled.outcomes(), alpha, &classical_grid)?;
            push_set(&mut methods, &mut notes, "classical", &classical)?;
            let imputation =
                score_band_set(&pinball, None, unlabeled.predictions(), alpha, &grid)?;
            push_set(&mut methods, &mut notes, "imputation", &imputation)?;
        }
        EstimandKind::Logistic | EstimandKind::Poisson => {
            let link = if estimand.kind == EstimandKind::Logistic {
                GlmLink::Logistic
            } else {
                GlmLink::Poisson
            };
            let d = labeled.dim();
            if d == 0 {
                return Err(Error::domain("regression estimands need feature columns"));
            }
            if d > 3 {
                // profile sets only; summarize the first coordinate and note it
                let sets = glm_profile_sets(labeled, unlabeled, alpha, link, 200)?;
                notes.push(format!(
                    "d = {d} > 3: per-coordinate profile sets (others pinned at the \
                     point estimate); coordinate 0 shown, not a joint region"
                ));
                push_set(&mut methods, &mut notes, "pp", &sets[0])?;
            } else {
                let grid = default_glm_grid(labeled, unlabeled, link, 200)?;
                let pp = match link {
                    GlmLink::Logistic => pp_logistic(labeled, unlabeled, alpha, &grid)?,
                    GlmLink::Poisson => pp_poisson(labeled, unlabeled, alpha, &grid)?,
                };
                push_set(&mut methods, &mut notes, "pp", &pp)?;
                let gradient = glm_gradient(link, d)?;
                let classical = score_band_set(
                    &gradient,
                    labeled.features(),
                    labeled.outcomes(),
                    alpha,
                    &grid,
                )?;
                push_set(&mut methods, &mut notes, "classical", &classical)?;
                let imputation = score_band_set(
                    &gradient,
                    unlabeled.features(),
                    unlabeled.predictions(),
                    alpha,
                    &grid,
                )?;
                push_set(&mut methods, &mut notes, "imputation", &imputation)?;
            }
        }
        EstimandKind::Ols(j_star) => {
            push_interval(
                &mut methods,
                &mut notes,
                "pp",
                pp_ols(labeled, unlabeled, j_star, alpha)?,
            );
            push_interval(
                &mut methods,
                &mut notes,
                "classical",
                ols_sandwich_interval(
                    labeled.features(),
                    labeled.outcomes(),
                    j_star,
                    alpha,
                )?,
            );
            push_interval(
                &mut methods,
                &mut notes,
                "imputation",
                ols_sandwich_interval(
                    unlabeled.features(),
                    unlabeled.predictions(),
                    j_star,
                    alpha,
                )?,
            );
        }
        EstimandKind::Convex(loss) => {
            let gradient = match loss {
                ConvexLoss::Squared => GradientSpec::squared(),
                ConvexLoss::Pinball(q) => GradientSpec::pinball(q)?,
            };
            let grid = GridSpec::spanning(unlabeled.predictions(), 1000)?;
            let pp = pp_convex(labeled, unlabeled, &gradient, alpha, &grid)?;
            push_set(&mut methods, &mut notes, "pp", &pp)?;
            let classical_grid = GridSpec::spanning(labeled.outcomes(), 1000)?;
            let classical = score_band_set(
                &gradient,
                labeled.features(),
                labeled.outcomes(),
                alpha,
                &classical_grid,
            )?;
            push_set(&mut methods, &mut notes, "classical", &classical)?;
            let imputation = score_band_set(
                &gradient,
                unlabeled.features(),
                unlabeled.predictions(),
                alpha,
                &grid,
            )?;
            push_set(&mut methods, &mut notes, "imputation", &imputation)?;
        }
        EstimandKind::Risk(loss) => {
            let spec = risk_loss_spec(loss)?;
            let delta = estimand.delta.unwrap_or(alpha / 2.0);
            let split = BudgetSplit::new(alpha, delta)?;
            let plan_seed = seed.unwrap_or(DEFAULT_SPLIT_SEED);
            let plan = SplitPlan::seeded(unlabeled.len(), plan_seed)?;
            notes.push(format!("risk split seed: {plan_seed}"));
            let res = pp_risk_min(labeled, unlabeled, &spec, split, &plan)?;
            let retained = res.retained_values();
            let hull = retained
                .first()
                .map(|&lo| (lo, *retained.last().expect("nonempty")));
            methods.push(MethodReport {
                name: "pp",
                outcome: MethodOutcome::Set {
                    hull,
                    retained: res.retained.len(),
                    total: res.theta.len(),
                    level: res.level,
                },
            });
            // labeled-only and imputed empirical-risk baselines with
            // two-sided Hoeffding slack
            for (name, values) in [
                ("classical", labeled.outcomes()),
                ("imputation", unlabeled.predictions()),
            ] {
                let theta = spec.resolve_theta(unlabeled.predictions())?;
                let slack =
                    2.0 * hoeffding_width(spec.bound, alpha / 2.0, values.len())?;
                let mut levels = Vec::with_capacity(theta.len());
                for &t in &theta {
                    let mut acc = 0.0;
                    for &v in values {
                        acc += spec.loss(t, &[], v)?;
                    }
                    levels.push(acc / values.len() as f64);
                }
                let best = levels.iter().cloned().fold(f64::INFINITY, f64::min);
                let kept: Vec<f64> = theta
                    .iter()
                    .zip(&levels)
                    .filter(|(_, &l)| l <= best + slack)
                    .map(|(&t, _)| t)
                    .collect();
                let hull = kept.first().map(|&lo| (lo, *kept.last().expect("nonempty")));
                methods.push(MethodReport {
                    name,
                    outcome: MethodOutcome::Set {
                        hull,
                        retained: kept.len(),
                        total: theta.len(),
                        level: 1.0 - alpha,
                    },
                });
            }
        }
    }

    Ok(AnalysisReport {
        estimand: estimand.kind.to_string(),
        n: labeled.len(),
        big_n: unlabeled.len(),
        alpha,
        methods,
        notes,
    })
}

/// Single-dataset OLS interval with the heteroskedasticity-robust sandwich
/// variance; the classical and imputation baselines for regression.
fn ols_sandwich_interval(
    features: Option<&[Vec<f64>]>,
    outcomes: &[f64],
    j_star: usize,
    alpha: f64,
) -> Result<Interval> {
    use nalgebra::{DMatrix, DVector};
    let rows = features.ok_or_else(|| Error::domain("OLS needs feature columns"))?;
    let n = rows.len();
    let d = rows[0].len();
    if j_star >= d {
        return Err(Error::domain(format!("coefficient {j_star} out of range for d = {d}")));
    }
    if n <= d {
        return Err(Error::domain("OLS requires more rows than features"));
    }
    let x = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(outcomes);
    let theta = crate::estimators::pinv_matrix(&x, "design")? * &yv;
    let resid = &yv - &x * &theta;
    let sigma = x.transpose() * &x / n as f64;
    let mut meat = DMatrix::zeros(d, d);
    for i in 0..n {
        let xi = x.row(i).transpose();
        meat += resid[i] * resid[i] * &xi * xi.transpose();
    }
    meat /= n as f64;
    let sigma_inv = sigma
        .try_inverse()
        .ok_or_else(|| Error::Linalg("Gram matrix is singular".into()))?;
    let v = &sigma_inv * meat * &sigma_inv;
    let half = normal_quantile(1.0 - alpha / 2.0)? * (v[(j_star, j_star)] / n as f64).sqrt();
    let center = theta[j_star];
    if half == 0.0 {
        return Interval::degenerate_at(center, 1.0 - alpha);
    }
    Interval::new(center - half, center + half, 1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{EstimandKind, EstimandSpec};

    fn fixture() -> (LabeledSet, UnlabeledSet) {
        (
            LabeledSet::from_pairs(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap(),
            UnlabeledSet::from_predictions(vec![1.0, 1.0, 1.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn mean_report_echoes_the_derived_fixture() {
        let (l, u) = fixture();
        let spec = EstimandSpec::new(EstimandKind::Mean, 0.05).unwrap();
        let report = run_analysis(&l, &u, &spec, None).unwrap();
        match report.method("pp").unwrap() {
            MethodOutcome::Interval(iv) => {
                assert!((iv.lower - (-0.38595)).abs() < 1e-4);
                assert!((iv.upper - 2.38595).abs() < 1e-4);
            }
            other => panic!("expected interval, got {other:?}"),
        }
    }

    #[test]
    fn classical_baseline_delegates_to_clt() {
        let (l, u) = fixture();
        let spec = EstimandSpec::new(EstimandKind::Mean, 0.05).unwrap();
        let report = run_analysis(&l, &u, &spec, None).unwrap();
        let direct = clt_mean_interval(l.outcomes(), 0.05).unwrap();
        match report.method("classical").unwrap() {
            MethodOutcome::Interval(iv) => {
                assert_eq!((iv.lower, iv.upper), (direct.lower, direct.upper));
            }
            other => panic!("expected interval, got {other:?}"),
        }
    }

    #[test]
    fn imputation_ignores_labels() {
        let y1 = vec![0.1, 0.9, 0.4];
        let y2 = vec![0.9, 0.4, 0.1]; // shuffled labels
        let f = vec![0.3, 0.5, 0.7];
        let fu = vec![0.2, 0.4, 0.6, 0.8];
        let spec = EstimandSpec::new(EstimandKind::Mean, 0.1).unwrap();
        let u = UnlabeledSet::from_predictions(fu).unwrap();
        let a = run_analysis(&LabeledSet::from_pairs(y1, f.clone()).unwrap(), &u, &spec, None)
            .unwrap();
        let b = run_analysis(&LabeledSet::from_pairs(y2, f).unwrap(), &u, &spec, None).unwrap();
        assert_eq!(a.method("imputation"), b.method("imputation"));
    }

    #[test]
    fn quantile_report_produces_three_sets() {
        let y: Vec<f64> = (0..30).map(|i| i as f64 / 10.0).collect();
        let f: Vec<f64> = y.iter().map(|v| v + 0.05).collect();
        let fu: Vec<f64> = (0..100).map(|i| i as f64 / 33.0).collect();
        let l = LabeledSet::from_pairs(y, f).unwrap();
        let u = UnlabeledSet::from_predictions(fu).unwrap();
        let spec = EstimandSpec::new(EstimandKind::Quantile(0.5), 0.1).unwrap();
        let report = run_analysis(&l, &u, &spec, None).unwrap();
        assert_eq!(report.methods.len(), 3);
        for m in &report.methods {
            assert!(matches!(m.outcome, MethodOutcome::Set { .. }));
        }
    }

    #[test]
    fn risk_report_records_split_seed() {
        let y = vec![1.0, 0.0, 1.0, 1.0];
        let l = LabeledSet::from_pairs(y.clone(), y).unwrap();
        let u = UnlabeledSet::from_predictions(vec![1.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        let spec = EstimandSpec::new(EstimandKind::Risk(RiskLoss::ModeDiscrete), 0.2).unwrap();
        let report = run_analysis(&l, &u, &spec, Some(11)).unwrap();
        assert!(report.notes.iter().any(|n| n.contains("seed: 11")));
    }

    #[test]
    fn csv_and_text_render() {
        let (l, u) = fixture();
        let spec = EstimandSpec::new(EstimandKind::Mean, 0.05).unwrap();
        let report = run_analysis(&l, &u, &spec, None).unwrap();
        let text = report.to_text();
        assert!(text.contains("pp"));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 4);
    }
}
