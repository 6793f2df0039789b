//! Variance-adaptive nonasymptotic confidence sets for a bounded mean via
//! test supermartingales, in i.i.d. and sampling-without-replacement forms.
//!
//! For every candidate mean m on a grid of [0, 1], two capital processes bet
//! against m: one profits when the data run above m, the other when they run
//! below. The bets are predictable (they use the running variance estimate
//! from the previous step) and truncated so that no single observation can
//! bankrupt the gambler. A candidate is rejected once the hedged capital
//! max(M+, M-)/2 reaches 1/alpha; by Ville's inequality the true mean is
//! rejected with probability at most alpha, so the surviving candidates form
//! a level 1-alpha confidence set.
//!
//! Capitals are tracked in log space: the truncation keeps every multiplicand
//! at or above 0.5, so log-capital moves by at most ln 2 per step downward
//! and never overflows upward between intersection checks.

use crate::error::{Error, Result};
use crate::stats::{check_alpha, Interval};

/// When the running intersection (the rejection test) is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum IntersectionSchedule {
    /// Every step up to n = 10^4 observations, then a geometric subsequence.
    Auto,
    EveryStep,
    /// Check at times ceil(r^k), r > 1, together with the final step.
    Geometric(f64),
    /// Explicit 1-based check times; the final step is always included.
    At(Vec<usize>),
}

/// Inputs of the betting construction: error level, the known range of the
/// observations, the candidate-mean grid, and the intersection schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct BettingConfig {
    pub alpha: f64,
    pub range_low: f64,
    pub range_high: f64,
    pub grid_resolution: usize,
    pub schedule: IntersectionSchedule,
}

impl BettingConfig {
    pub fn new(alpha: f64, range_low: f64, range_high: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(range_low.is_finite() && range_high.is_finite()) {
            return Err(Error::domain("betting range must be finite"));
        }
        if range_low >= range_high {
            return Err(Error::domain(format!(
                "betting range [{range_low}, {range_high}] is empty"
            )));
        }
        Ok(BettingConfig {
            alpha,
            range_low,
            range_high,
            grid_resolution: 1000,
            schedule: IntersectionSchedule::Auto,
        })
    }

    pub fn with_resolution(mut self, grid_resolution: usize) -> Result<Self> {
        if grid_resolution < 2 {
            return Err(Error::domain("grid resolution must be at least 2"));
        }
        self.grid_resolution = grid_resolution;
        Ok(self)
    }

    pub fn with_schedule(mut self, schedule: IntersectionSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn check_times(&self, n: usize) -> Vec<bool> {
        let mut check = vec![false; n + 1];
        match &self.schedule {
            IntersectionSchedule::EveryStep => check[1..].fill(true),
            IntersectionSchedule::Auto => {
                if n <= 10_000 {
                    check[1..].fill(true);
                } else {
                    geometric_times(1.05, &mut check);
                }
            }
            IntersectionSchedule::Geometric(r) => geometric_times(r.max(1.0001), &mut check),
            IntersectionSchedule::At(times) => {
                for &t in times {
                    if t >= 1 && t <= n {
                        check[t] = true;
                    }
                }
            }
        }
        if n >= 1 {
            check[n] = true;
        }
        check
    }
}

fn geometric_times(ratio: f64, check: &mut [bool]) {
    let n = check.len() - 1;
    let mut t = 1.0_f64;
    while (t as usize) <= n {
        check[t.ceil() as usize] = true;
        t = (t * ratio).max(t + 1.0);
    }
}

/// Capital state of one candidate mean.
#[derive(Debug, Clone, Copy)]
pub struct MartingaleState {
    pub m: f64,
    /// ln of the capital betting that the true mean exceeds m.
    pub log_capital_plus: f64,
    /// ln of the capital betting that the true mean is below m.
    pub log_capital_minus: f64,
    pub rejected: bool,
}

impl MartingaleState {
    fn fresh(m: f64) -> Self {
        MartingaleState { m, log_capital_plus: 0.0, log_capital_minus: 0.0, rejected: false }
    }
}

/// Running mean/variance recursion shared by both samplers. The 1/2 and 1/4
/// priors keep the variance estimate strictly positive from the first step.
struct BetSizer {
    n: f64,
    log_two_over_alpha: f64,
    sum: f64,
    sum_sq: f64,
    t: usize,
    prev_var: f64,
}

impl BetSizer {
    fn new(n: usize, alpha: f64) -> Self {
        BetSizer {
            n: n as f64,
            log_two_over_alpha: (2.0 / alpha).ln(),
            sum: 0.0,
            sum_sq: 0.0,
            t: 0,
            prev_var: 0.25,
        }
    }

    /// Consume one observation and return the bet scale lambda_t, which is
    /// predictable: it only uses the variance estimate from step t - 1.
    fn lambda(&mut self, z: f64) -> f64 {
        let lambda = (2.0 * self.log_two_over_alpha / (self.n * self.prev_var)).sqrt();
        self.t += 1;
        self.sum += z;
        self.sum_sq += z * z;
        let t = self.t as f64;
        let mu = (0.5 + self.sum) / (t + 1.0);
        self.prev_var =
            (0.25 + self.sum_sq - 2.0 * mu * self.sum + t * mu * mu) / (t + 1.0);
        lambda
    }
}

fn normalize(samples: &[f64], config: &BettingConfig) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let width = config.range_high - config.range_low;
    samples
        .iter()
        .map(|&x| {
            if !x.is_finite() || x < config.range_low || x > config.range_high {
                return Err(Error::domain(format!(
                    "sample {x} outside declared range [{}, {}]; the coverage \
                     guarantee does not hold",
                    config.range_low, config.range_high
                )));
            }
            Ok((x - config.range_low) / width)
        })
        .collect()
}

fn grid(config: &BettingConfig) -> Vec<MartingaleState> {
    let g = config.grid_resolution;
    (0..g)
        .map(|i| MartingaleState::fresh(i as f64 / (g - 1) as f64))
        .collect()
}

fn hull_to_interval(alive: &[MartingaleState], config: &BettingConfig) -> Result<Interval> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in alive.iter().filter(|s| !s.rejected) {
        lo = lo.min(s.m);
        hi = hi.max(s.m);
    }
    if lo > hi {
        return Err(Error::Numerical(
            "every candidate mean was rejected; no confidence set remains".into(),
        ));
    }
    let width = config.range_high - config.range_low;
    Interval::new(
        lo * width + config.range_low,
        hi * width + config.range_low,
        1.0 - config.alpha,
    )
}

/// Betting confidence interval for the mean of i.i.d. samples with known
/// range. Returns the convex hull of the surviving candidate grid, rescaled
/// to the original range; coverage is at least 1 - alpha for every n.
///
/// The samples must be in their i.i.d. sampling order: the capital updates
/// condition on the past, so a data-dependent ordering (sorted values, say)
/// voids the guarantee. Callers holding data of unknown row order should
/// apply an independent permutation first, as the higher-level estimators
/// in this crate do.
pub fn wsr_mean_ci(samples: &[f64], config: &BettingConfig) -> Result<Interval> {
    let z = normalize(samples, config)?;
    let n = z.len();
    let check = config.check_times(n);
    let threshold = (2.0 / config.alpha).ln();
    let mut sizer = BetSizer::new(n, config.alpha);
    let mut alive = grid(config);

    for (t, &zt) in z.iter().enumerate() {
        let t = t + 1;
        let lambda = sizer.lambda(zt);
        for s in alive.iter_mut() {
            let bet_plus = lambda.min(0.5 / s.m);
            let bet_minus = lambda.min(0.5 / (1.0 - s.m));
            s.log_capital_plus += (1.0 + bet_plus * (zt - s.m)).ln();
            s.log_capital_minus += (1.0 - bet_minus * (zt - s.m)).ln();
        }
        if check[t] {
            alive.retain(|s| {
                s.log_capital_plus.max(s.log_capital_minus) < threshold
            });
            if alive.is_empty() {
                break;
            }
        }
    }
    hull_to_interval(&alive, config)
}

/// Betting confidence interval for the mean of a fixed finite population of
/// size N from which the samples were drawn uniformly without replacement,
/// in the given order.
///
/// Candidate m is tested through its putative mean: the average the
/// remaining units would need for the population mean to equal m. A putative
/// mean outside [0, 1] makes the candidate impossible and rejects it
/// immediately, independent of the intersection schedule.
pub fn wsr_finite_pop_ci(
    samples: &[f64],
    population_size: usize,
    config: &BettingConfig,
) -> Result<Interval> {
    let z = normalize(samples, config)?;
    let n = z.len();
    if n > population_size {
        return Err(Error::domain(format!(
            "sample size {n} exceeds population size {population_size}"
        )));
    }
    let big_n = population_size as f64;
    let check = config.check_times(n);
    let threshold = (2.0 / config.alpha).ln();
    let mut sizer = BetSizer::new(n, config.alpha);
    let mut alive = grid(config);
    let mut seen_sum = 0.0_f64;

    for (t, &zt) in z.iter().enumerate() {
        let t = t + 1;
        let lambda = sizer.lambda(zt);
        let remaining = big_n - (t as f64 - 1.0);
        for s in alive.iter_mut() {
            let putative = (big_n * s.m - seen_sum) / remaining;
            // impossibility check with an ulp guard: the true mean's
            // putative value can graze the boundary through rounding
            if putative < -1e-12 || putative > 1.0 + 1e-12 {
                s.rejected = true;
                continue;
            }
            let putative = putative.clamp(0.0, 1.0);
            let bet_plus = lambda.min(0.5 / putative);
            let bet_minus = lambda.min(0.5 / (1.0 - putative));
            s.log_capital_plus += (1.0 + bet_plus * (zt - putative)).ln();
            s.log_capital_minus += (1.0 - bet_minus * (zt - putative)).ln();
        }
        seen_sum += zt;
        if check[t] {
            alive.retain(|s| {
                !s.rejected && s.log_capital_plus.max(s.log_capital_minus) < threshold
            });
        } else {
            alive.retain(|s| !s.rejected);
        }
        if alive.is_empty() {
            break;
        }
    }
    hull_to_interval(&alive, config)
}
