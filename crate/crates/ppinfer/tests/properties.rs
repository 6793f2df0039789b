//! Property-based invariants:
//!
//! 1. Normal quantile antisymmetry: z(p) = -z(1-p).
//! 2. Binomial CDF nondecreasing in k; Galois consistency of the inverse.
//! 3. CLT interval: constant shifts move the midpoint, not the width.
//! 4. CSV round-trip: a serialized labeled set reloads bit-for-bit.
//! 5. Betting CI: dyadic affine maps commute exactly with the interval.
//! 6. Betting CI: surviving hull stays inside the declared range.
//! 7. Odds-ratio endpoints are monotone in each input endpoint.
//! 8. Minkowski combiner monotone under interval enlargement.

use proptest::prelude::*;

use ppinfer::betting::{wsr_mean_ci, BettingConfig};
use ppinfer::data::{load_labeled, CsvSchema, LabeledSet};
use ppinfer::grid::GridSpec;
use ppinfer::nonasymptotic::combine_minkowski;
use ppinfer::odds::odds_ratio_interval;
use ppinfer::stats::{
    binomial_cdf, binomial_cdf_inverse, clt_mean_interval, normal_quantile, Interval,
};

fn finite_sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 2..40)
}

proptest! {
    #[test]
    fn normal_quantile_antisymmetric(p in 1e-6f64..0.999_999) {
        let a = normal_quantile(p).unwrap();
        let b = normal_quantile(1.0 - p).unwrap();
        prop_assert!((a + b).abs() < 1e-9, "z({p}) = {a}, z({}) = {b}", 1.0 - p);
    }

    #[test]
    fn binomial_cdf_monotone_and_galois(n in 1usize..80, p in 0.0f64..=1.0) {
        let mut prev = 0.0;
        for k in 0..=n {
            let v = binomial_cdf(k, n, p).unwrap();
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
        for k in 0..=n {
            let f = binomial_cdf(k, n, p).unwrap();
            if f > 0.0 {
                let back = binomial_cdf_inverse(f, n, p).unwrap();
                prop_assert!(back <= k, "F({k}) = {f} inverted to {back}");
            }
        }
    }

    #[test]
    fn clt_interval_shift_equivariance(samples in finite_sample(), shift in -100f64..100.0) {
        let base = clt_mean_interval(&samples, 0.1).unwrap();
        let shifted: Vec<f64> = samples.iter().map(|v| v + shift).collect();
        let moved = clt_mean_interval(&shifted, 0.1).unwrap();
        let scale = 1.0 + base.width() + shift.abs();
        prop_assert!((moved.width() - base.width()).abs() < 1e-9 * scale);
        prop_assert!((moved.midpoint() - base.midpoint() - shift).abs() < 1e-9 * scale);
    }

    #[test]
    fn labeled_csv_round_trip(
        rows in prop::collection::vec((-1e12f64..1e12, -1e12f64..1e12, -1e12f64..1e12), 1..20)
    ) {
        let features: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0]).collect();
        let outcomes: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let predictions: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let set = LabeledSet::new(Some(features), outcomes, predictions).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("roundtrip.csv");
        std::fs::write(&path, &buf).unwrap();
        let reloaded = load_labeled(&path, &CsvSchema::default()).unwrap();
        prop_assert_eq!(set, reloaded);
    }

    #[test]
    fn betting_interval_dyadic_affine_exact(
        samples in prop::collection::vec(0.0f64..=1.0, 5..60),
        pow in -2i32..3,
        offset_ticks in -8i32..8,
    ) {
        let a = 2f64.powi(pow);
        let b = offset_ticks as f64 * 0.25;
        let base = BettingConfig::new(0.1, 0.0, 1.0).unwrap();
        let mapped_config = BettingConfig::new(0.1, b, a + b).unwrap();
        let mapped: Vec<f64> = samples.iter().map(|x| a * x + b).collect();
        let iv = wsr_mean_ci(&samples, &base).unwrap();
        let iv_mapped = wsr_mean_ci(&mapped, &mapped_config).unwrap();
        prop_assert_eq!(iv_mapped.lower, a * iv.lower + b);
        prop_assert_eq!(iv_mapped.upper, a * iv.upper + b);
    }

    #[test]
    fn betting_interval_respects_range(
        samples in prop::collection::vec(-3.0f64..7.0, 4..50),
        alpha in 0.01f64..0.5,
    ) {
        let config = BettingConfig::new(alpha, -3.0, 7.0).unwrap();
        let iv = wsr_mean_ci(&samples, &config).unwrap();
        prop_assert!(iv.lower >= -3.0 && iv.upper <= 7.0);
        prop_assert!(iv.lower <= iv.upper);
    }

    #[test]
    fn odds_ratio_monotone(
        l0 in 0.05f64..0.4,
        u0_gap in 0.01f64..0.3,
        l1 in 0.3f64..0.6,
        u1_gap in 0.01f64..0.3,
        bump in 0.001f64..0.05,
    ) {
        let iv = |lo: f64, hi: f64| Interval::new(lo, hi, 0.975).unwrap();
        let base = odds_ratio_interval(&iv(l0, l0 + u0_gap), &iv(l1, l1 + u1_gap)).unwrap();
        // raising l1 raises the lower output endpoint
        let up_l1 = odds_ratio_interval(&iv(l0, l0 + u0_gap), &iv(l1 + bump, l1 + u1_gap + bump))
            .unwrap();
        prop_assert!(up_l1.lower >= base.lower - 1e-12);
        // raising l0 lowers the upper output endpoint
        let up_l0 = odds_ratio_interval(&iv(l0 + bump, l0 + u0_gap + bump), &iv(l1, l1 + u1_gap))
            .unwrap();
        prop_assert!(up_l0.upper <= base.upper + 1e-12);
    }

    #[test]
    fn minkowski_combiner_monotone(
        centers in prop::collection::vec(-1.0f64..1.0, 2..12),
        widen in 0.0f64..0.5,
    ) {
        let grid = GridSpec::linear(0.0, 1.0, centers.len()).unwrap();
        let rect: Vec<Interval> = centers
            .iter()
            .map(|&c| Interval::new(c - 0.1, c + 0.1, 0.95).unwrap())
            .collect();
        let pred: Vec<Interval> = centers
            .iter()
            .map(|&c| Interval::new(-c - 0.05, -c + 0.05, 0.95).unwrap())
            .collect();
        let base = combine_minkowski(&rect, &pred, &grid).unwrap();
        let wider: Vec<Interval> = rect
            .iter()
            .map(|iv| Interval::new(iv.lower - widen, iv.upper + widen, 0.95).unwrap())
            .collect();
        let grown = combine_minkowski(&wider, &pred, &grid).unwrap();
        for idx in &base.retained {
            prop_assert!(grown.contains_index(*idx));
        }
    }
}
