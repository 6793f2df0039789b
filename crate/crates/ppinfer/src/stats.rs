//! Scalar statistical primitives shared by every estimator: normal
//! quantiles, empirical moments, CLT mean intervals (i.i.d. and finite
//! population), binomial CDF machinery, and the DKWM radius.
//!
//! Variances everywhere use the population divisor `n`, not `n - 1`. The
//! difference is O(1/n) and all downstream interval formulas are written
//! against the population form.

use crate::error::{Error, Result};

/// A real confidence interval with the error level it was built at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    /// Confidence level 1 - alpha in (0, 1).
    pub level: f64,
    /// Set when the interval collapsed to a point because the estimated
    /// variance was exactly zero (e.g. perfect predictions).
    pub degenerate: bool,
    pub unbounded_lower: bool,
    pub unbounded_upper: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, level: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(Error::domain("interval endpoints must be finite"));
        }
        if lower > upper {
            return Err(Error::domain(format!(
                "interval lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        check_level(level)?;
        Ok(Interval {
            lower,
            upper,
            level,
            degenerate: false,
            unbounded_lower: false,
            unbounded_upper: false,
        })
    }

    /// Point interval at `x`, flagged degenerate.
    pub fn degenerate_at(x: f64, level: f64) -> Result<Self> {
        let mut iv = Interval::new(x, x, level)?;
        iv.degenerate = true;
        Ok(iv)
    }

    /// Interval with an explicitly flagged infinite upper endpoint.
    pub fn unbounded_above(lower: f64, level: f64) -> Result<Self> {
        let mut iv = Interval::new(lower, lower, level)?;
        iv.upper = f64::INFINITY;
        iv.unbounded_upper = true;
        Ok(iv)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Closed-interval containment.
    pub fn contains(&self, x: f64) -> bool {
        (self.unbounded_lower || x >= self.lower) && (self.unbounded_upper || x <= self.upper)
    }
}

/// Count, mean, and population-divisor variance of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl SampleMoments {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empty sample"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sample contains NaN or infinite values"));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let variance = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        Ok(SampleMoments { n, mean, variance })
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level {level} outside (0, 1)")));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(())
}

// --- standard normal distribution -----------------------------------------

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6; // 2/sqrt(pi)

/// erf by its Taylor series; converges fast for |x| <= 2.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        let k = k as f64;
        term *= -x2 / k;
        let contrib = term / (2.0 * k + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// erfc for x >= 2 via the classical continued fraction
/// sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
/// evaluated with the modified Lentz algorithm.
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0;
    for k in 1..300 {
        let a = k as f64 / 2.0;
        let b = x;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    // f now approximates x + cf-tail, so sqrt(pi) e^{x^2} erfc(x) = 1/f.
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// Standard normal CDF, accurate to ~1e-15 absolute.
pub fn normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2; // Phi(x) = erfc(-x/sqrt(2)) / 2
    if z >= 0.0 {
        if z < 2.0 {
            0.5 * (1.0 + erf_series(z))
        } else {
            1.0 - 0.5 * erfc_cf(z)
        }
    } else if z > -2.0 {
        0.5 * (1.0 - erf_series(-z))
    } else {
        0.5 * erfc_cf(-z)
    }
}

/// Quantile of the standard normal distribution: z with Phi(z) = p.
///
/// Bisection on the series/continued-fraction CDF, so the result is
/// verifiable against an independent CDF evaluation to 1e-9 absolute.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile argument {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (-41.5_f64, 41.5_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// --- CLT mean intervals ----------------------------------------------------

/// Central-limit-theorem interval for an i.i.d. mean:
/// sample mean +/- z_{1-alpha/2} * sigma_hat / sqrt(n).
pub fn clt_mean_interval(samples: &[f64], alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    let m = SampleMoments::from_samples(samples)?;
    let half = normal_quantile(1.0 - alpha / 2.0)? * m.std() / (m.n as f64).sqrt();
    if half == 0.0 {
        return Interval::degenerate_at(m.mean, 1.0 - alpha);
    }
    Interval::new(m.mean - half, m.mean + half, 1.0 - alpha)
}

/// CLT interval for the mean of a fixed finite population sampled without
/// replacement: the i.i.d. width shrunk by sqrt((N - n) / N).
pub fn finite_pop_clt_interval(
    samples: &[f64],
    population_size: usize,
    alpha: f64,
) -> Result<Interval> {
    check_alpha(alpha)?;
    if population_size == 0 {
        return Err(Error::domain("population size must be at least 1"));
    }
    let m = SampleMoments::from_samples(samples)?;
    if m.n > population_size {
        return Err(Error::domain(format!(
            "sample size {} exceeds population size {population_size}",
            m.n
        )));
    }
    let correction = ((population_size - m.n) as f64 / population_size as f64).sqrt();
    let half = normal_quantile(1.0 - alpha / 2.0)? * m.std() / (m.n as f64).sqrt() * correction;
    if half == 0.0 {
        return Interval::degenerate_at(m.mean, 1.0 - alpha);
    }
    Interval::new(m.mean - half, m.mean + half, 1.0 - alpha)
}

// --- binomial CDF machinery -------------------------------------------------

/// P(Binom(n, p) <= k) with stable log-space term evaluation.
pub fn binomial_cdf(k: usize, n: usize, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("binomial cdf argument k={k} exceeds n={n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("success probability {p} outside [0, 1]")));
    }
    if p == 0.0 || k == n {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut log_coeff = 0.0_f64; // ln C(n, 0)
    let mut sum = 0.0_f64;
    for j in 0..=k {
        if j > 0 {
            log_coeff += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        sum += (log_coeff + j as f64 * lp + (n - j) as f64 * lq).exp();
    }
    Ok(sum.min(1.0))
}

/// Generalized inverse CDF: the smallest k with binomial_cdf(k, n, p) >= level.
pub fn binomial_cdf_inverse(level: f64, n: usize, p: f64) -> Result<usize> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::domain(format!("inverse cdf level {level} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("success probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(if level <= 0.0 { 0 } else { n });
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut log_coeff = 0.0_f64;
    let mut sum = 0.0_f64;
    for k in 0..=n {
        if k > 0 {
            log_coeff += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        sum += (log_coeff + k as f64 * lp + (n - k) as f64 * lq).exp();
        if sum >= level {
            return Ok(k);
        }
    }
    // The CDF reaches exactly 1 at k = n; rounding can leave the running sum
    // a few ulps short of an attainable level.
    Ok(n)
}

// --- DKWM radius -------------------------------------------------------------

/// Uniform concentration radius sqrt((2/N) log(2/level)) for the empirical
/// prediction distribution built from `unlabeled_count` draws.
pub fn dkwm_radius(unlabeled_count: usize, level: f64) -> Result<f64> {
    check_level(level)?;
    if unlabeled_count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    Ok((2.0 / unlabeled_count as f64 * (2.0 / level).ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent CDF oracle: Phi(z) = 0.5 + integral of the density over
    /// [0, z] by Simpson's rule. Shares no code with the implementation path.
    fn normal_cdf_quadrature(z: f64) -> f64 {
        let steps = 40_000usize;
        let h = z / steps as f64;
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = density(0.0) + density(z);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * density(i as f64 * h);
        }
        0.5 + acc * h / 3.0
    }

    #[test]
    fn normal_quantile_median_is_zero() {
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-9);
    }

    #[test]
    fn normal_quantile_matches_quadrature_oracle() {
        // 0.975 -> 1.959964, frozen from the quadrature oracle.
        let z = normal_quantile(0.975).unwrap();
        assert!((z - 1.959964).abs() < 1e-6, "z = {z}");
        assert!((normal_cdf_quadrature(z) - 0.975).abs() < 1e-9);

        // Phi(1) by the oracle: 0.8413447...
        let p = normal_cdf_quadrature(1.0);
        assert!((p - 0.8413447).abs() < 1e-7);
        let z = normal_quantile(0.8413447).unwrap();
        assert!((z - 1.0).abs() < 1e-5, "z = {z}");
    }

    #[test]
    fn normal_quantile_antisymmetry() {
        for &p in &[0.01, 0.2, 0.37, 0.5, 0.9, 0.999] {
            let a = normal_quantile(p).unwrap();
            let b = normal_quantile(1.0 - p).unwrap();
            assert!((a + b).abs() < 1e-9, "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn normal_quantile_rejects_out_of_range() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(-0.2).is_err());
    }

    #[test]
    fn normal_cdf_agrees_with_quadrature() {
        for &z in &[-3.5, -1.0, -0.1, 0.0, 0.7, 2.0, 4.2] {
            let got = normal_cdf(z);
            let want = normal_cdf_quadrature(z);
            assert!((got - want).abs() < 1e-9, "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn clt_interval_zero_variance_is_degenerate_point() {
        let iv = clt_mean_interval(&[2.0, 2.0, 2.0], 0.05).unwrap();
        assert_eq!((iv.lower, iv.upper), (2.0, 2.0));
        assert!(iv.degenerate);
    }

    #[test]
    fn clt_interval_hand_arithmetic() {
        // mean 1, population sigma 1, half-width z_{0.975}/sqrt(2)
        let iv = clt_mean_interval(&[0.0, 2.0], 0.05).unwrap();
        assert!((iv.lower - (-0.38595)).abs() < 1e-4, "{}", iv.lower);
        assert!((iv.upper - 2.38595).abs() < 1e-4, "{}", iv.upper);
    }

    #[test]
    fn clt_interval_midpoint_is_sample_mean() {
        let samples = [0.3, -1.2, 4.5, 2.2, 0.0];
        let iv = clt_mean_interval(&samples, 0.1).unwrap();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        assert!((iv.midpoint() - mean).abs() < 1e-12);
    }

    #[test]
    fn clt_interval_shift_invariance() {
        let samples = [0.4, 1.9, -0.3, 0.8];
        let shifted: Vec<f64> = samples.iter().map(|v| v + 5.0).collect();
        let a = clt_mean_interval(&samples, 0.05).unwrap();
        let b = clt_mean_interval(&shifted, 0.05).unwrap();
        assert!((a.width() - b.width()).abs() < 1e-10);
        assert!((b.midpoint() - a.midpoint() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn clt_interval_empty_sample_errors() {
        assert!(clt_mean_interval(&[], 0.05).is_err());
    }

    #[test]
    fn finite_pop_full_census_collapses() {
        let iv = finite_pop_clt_interval(&[1.0, 3.0, 5.0], 3, 0.05).unwrap();
        assert_eq!(iv.width(), 0.0);
        assert!(iv.degenerate);
        assert!((iv.midpoint() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn finite_pop_hand_arithmetic() {
        // half-width z_{0.975} * (1/sqrt(2)) * sqrt(1/2) = z/2
        let iv = finite_pop_clt_interval(&[0.0, 2.0], 4, 0.05).unwrap();
        assert!((iv.width() / 2.0 - 0.9800).abs() < 1e-4);
    }

    #[test]
    fn finite_pop_large_population_matches_iid() {
        let samples = [0.0, 2.0, 1.0, 0.5];
        let iid = clt_mean_interval(&samples, 0.05).unwrap();
        let fp = finite_pop_clt_interval(&samples, 100_000_000, 0.05).unwrap();
        assert!((iid.width() - fp.width()).abs() < 1e-7);
    }

    #[test]
    fn finite_pop_sample_larger_than_population_errors() {
        assert!(finite_pop_clt_interval(&[1.0, 2.0, 3.0], 2, 0.05).is_err());
    }

    #[test]
    fn binomial_cdf_enumeration() {
        // four equiprobable outcomes of Binom(2, 0.5)
        assert!((binomial_cdf(1, 2, 0.5).unwrap() - 0.75).abs() < 1e-12);
        assert!((binomial_cdf(0, 2, 0.5).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn binomial_cdf_total_probability() {
        assert_eq!(binomial_cdf(7, 7, 0.3).unwrap(), 1.0);
        assert_eq!(binomial_cdf(0, 3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn binomial_cdf_rejects_k_above_n() {
        assert!(binomial_cdf(3, 2, 0.5).is_err());
    }

    #[test]
    fn binomial_cdf_monotone() {
        let mut prev = 0.0;
        for k in 0..=10 {
            let v = binomial_cdf(k, 10, 0.37).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // nonincreasing in p for fixed k < n
        let mut prev = 1.0;
        for i in 1..10 {
            let v = binomial_cdf(3, 10, i as f64 / 10.0).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn binomial_inverse_enumeration() {
        assert_eq!(binomial_cdf_inverse(0.7, 2, 0.5).unwrap(), 1);
        assert_eq!(binomial_cdf_inverse(0.25, 2, 0.5).unwrap(), 0);
        assert_eq!(binomial_cdf_inverse(1.0, 9, 0.4).unwrap(), 9);
        assert!(binomial_cdf_inverse(0.0, 4, 0.5).is_err());
    }

    #[test]
    fn binomial_inverse_galois_consistency() {
        for k in 0..=12 {
            let f = binomial_cdf(k, 12, 0.3).unwrap();
            let k_back = binomial_cdf_inverse(f, 12, 0.3).unwrap();
            assert!(k_back <= k, "k={k} mapped back to {k_back}");
        }
    }

    #[test]
    fn dkwm_fixtures() {
        // log(2/level) = 2 at level = 2/e^2
        let lvl = 2.0 / std::f64::consts::E.powi(2);
        assert!((dkwm_radius(2, lvl).unwrap() - 2.0_f64.sqrt()).abs() < 1e-10);
        assert!((dkwm_radius(200, 0.05).unwrap() - 0.19208).abs() < 1e-4);
        // shrinks with N
        assert!(dkwm_radius(400, 0.05).unwrap() < dkwm_radius(200, 0.05).unwrap());
    }
}
