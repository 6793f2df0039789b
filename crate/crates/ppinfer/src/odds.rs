//! Odds-ratio interval propagated from two mean intervals.
//!
//! For class-conditional probabilities mu0 and mu1 with confidence intervals
//! [l0, u0] and [l1, u1], the odds ratio (mu1 odds) / (mu0 odds) is monotone
//! increasing in mu1 and decreasing in mu0, so the image of the rectangle is
//! the interval between the two extreme corners. When each input holds at
//! level 1 - alpha/2, a union bound gives the output level 1 - alpha.

use crate::error::{Error, Result};
use crate::stats::Interval;

fn odds(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Propagate intervals for mu0 and mu1 through the odds-ratio map.
///
/// Inputs must lie inside [0, 1]. An input endpoint sitting on a pole of
/// the map (l0 = 0 or u1 = 1) yields an explicitly flagged unbounded upper
/// endpoint rather than a silent infinity.
pub fn odds_ratio_interval(mu0: &Interval, mu1: &Interval) -> Result<Interval> {
    for (name, iv) in [("mu0", mu0), ("mu1", mu1)] {
        if iv.lower < 0.0 || iv.upper > 1.0 {
            return Err(Error::domain(format!(
                "{name} interval [{}, {}] escapes [0, 1]",
                iv.lower, iv.upper
            )));
        }
    }
    if mu0.upper == 0.0 {
        return Err(Error::domain("mu0 is identically 0; the odds ratio is undefined"));
    }
    if mu1.lower == 1.0 {
        return Err(Error::domain("mu1 is identically 1; the odds ratio is unbounded"));
    }
    let alpha_combined = (1.0 - mu0.level) + (1.0 - mu1.level);
    if alpha_combined >= 1.0 {
        return Err(Error::domain(format!(
            "combined error level {alpha_combined} leaves no confidence; \
             build the inputs at level 1 - alpha/2"
        )));
    }
    let level = 1.0 - alpha_combined;

    let lower = odds(mu1.lower) * (1.0 - mu0.upper) / mu0.upper;
    if mu0.lower == 0.0 || mu1.upper == 1.0 {
        return Interval::unbounded_above(lower, level);
    }
    let upper = odds(mu1.upper) / odds(mu0.lower);
    Interval::new(lower, upper, level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, 0.975).unwrap()
    }

    #[test]
    fn fixture_from_endpoint_arithmetic() {
        let out = odds_ratio_interval(&iv(0.25, 0.5), &iv(0.5, 0.75)).unwrap();
        assert_eq!(out.lower, 1.0);
        assert_eq!(out.upper, 9.0);
        assert!((out.level - 0.95).abs() < 1e-12);
    }

    #[test]
    fn identical_point_intervals_give_unit_ratio() {
        let p = Interval::new(0.3, 0.3, 0.975).unwrap();
        let out = odds_ratio_interval(&p, &p).unwrap();
        assert!((out.lower - 1.0).abs() < 1e-12);
        assert!((out.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pole_flags_unbounded_upper() {
        let out = odds_ratio_interval(&iv(0.25, 0.5), &iv(0.5, 1.0)).unwrap();
        assert!(out.unbounded_upper);
        assert!(out.upper.is_infinite());
        let out = odds_ratio_interval(&iv(0.0, 0.5), &iv(0.5, 0.75)).unwrap();
        assert!(out.unbounded_upper);
    }

    #[test]
    fn monotone_in_each_endpoint() {
        let base = odds_ratio_interval(&iv(0.25, 0.5), &iv(0.5, 0.75)).unwrap();
        // raising l1 raises the lower endpoint
        let higher_l1 = odds_ratio_interval(&iv(0.25, 0.5), &iv(0.6, 0.75)).unwrap();
        assert!(higher_l1.lower > base.lower);
        // raising u0 raises the lower endpoint (smaller divisor odds)
        let lower_u0 = odds_ratio_interval(&iv(0.25, 0.4), &iv(0.5, 0.75)).unwrap();
        assert!(lower_u0.lower > base.lower);
        // raising u1 raises the upper endpoint
        let higher_u1 = odds_ratio_interval(&iv(0.25, 0.5), &iv(0.5, 0.8)).unwrap();
        assert!(higher_u1.upper > base.upper);
        // raising l0 lowers the upper endpoint
        let higher_l0 = odds_ratio_interval(&iv(0.3, 0.5), &iv(0.5, 0.75)).unwrap();
        assert!(higher_l0.upper < base.upper);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let zero = Interval::new(0.0, 0.0, 0.975).unwrap();
        let one = Interval::new(1.0, 1.0, 0.975).unwrap();
        assert!(odds_ratio_interval(&zero, &iv(0.4, 0.6)).is_err());
        assert!(odds_ratio_interval(&iv(0.4, 0.6), &one).is_err());
        // levels too weak to combine
        let weak = Interval::new(0.4, 0.6, 0.4).unwrap();
        assert!(odds_ratio_interval(&weak, &weak).is_err());
    }
}
