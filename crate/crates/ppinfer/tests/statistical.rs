//! Statistical behavior checks that need Monte Carlo repetition: coverage
//! of the betting constructions at scale, conservativeness of the
//! nonasymptotic intervals, the root-n law of the classical baseline, and
//! slack monotonicity under nested datasets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::betting::{wsr_finite_pop_ci, BettingConfig};
use ppinfer::data::{EstimandKind, EstimandSpec, LabeledSet, UnlabeledSet};
use ppinfer::estimators::pp_mean;
use ppinfer::nonasymptotic::{pp_mean_na, pp_quantile_na, BudgetSplit};
use ppinfer::shift::label_shift_interval;
use ppinfer::sim::{coverage_sim, Generator, SimScenario};
use ppinfer::grid::GridSpec;

#[test]
fn hypergeometric_betting_coverage() {
    // fixed binary population, 30% ones, sampled without replacement
    let trials = 1000;
    let config = BettingConfig::new(0.05, 0.0, 1.0).unwrap();
    let mut covered = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(7_000 + trial);
        let mut pop: Vec<f64> = (0..500).map(|i| (i < 150) as i32 as f64).collect();
        pop.shuffle(&mut rng);
        let iv = wsr_finite_pop_ci(&pop[..100], 500, &config).unwrap();
        if iv.contains(0.3) {
            covered += 1;
        }
    }
    let coverage = covered as f64 / trials as f64;
    assert!(coverage >= 0.93, "hypergeometric coverage {coverage} below 0.93");
}

#[test]
fn nonasymptotic_mean_is_conservative_on_truncated_gaussians() {
    // bounded synthetic outcomes: the betting interval should be at least
    // as wide as the CLT interval on average (checked statistically)
    let trials = 60;
    let mut na_total = 0.0;
    let mut clt_total = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(11_000 + trial);
        let draw = |rng: &mut ChaCha8Rng| -> f64 {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen::<f64>();
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (0.5 + 0.15 * z).clamp(0.0, 1.0)
        };
        let n = 60;
        let big_n = 400;
        let mut y = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(n);
        for _ in 0..n {
            let yi = draw(&mut rng);
            y.push(yi);
            f.push((yi + 0.05 * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0));
        }
        let fu: Vec<f64> = (0..big_n).map(|_| draw(&mut rng)).collect();
        let labeled = LabeledSet::from_pairs(y, f).unwrap();
        let unlabeled = UnlabeledSet::from_predictions(fu).unwrap();
        let na = pp_mean_na(&labeled, &unlabeled, BudgetSplit::symmetric(0.1).unwrap(), 1.0)
            .unwrap();
        let clt = pp_mean(&labeled, &unlabeled, 0.1).unwrap();
        na_total += na.width();
        clt_total += clt.width();
    }
    assert!(
        na_total > clt_total,
        "betting widths {na_total} not above CLT widths {clt_total} on average"
    );
}

#[test]
fn budget_splits_all_cover() {
    // union-bound validity holds for any split of the error budget
    for (i, delta) in [0.01, 0.025, 0.04].into_iter().enumerate() {
        let scenario = SimScenario {
            generator: Generator::Bernoulli { p: 0.35, error: 0.1 },
            n: 80,
            big_n: 2_000,
            trials: 200,
            seed: 13_000 + i as u64,
            estimand: EstimandSpec::new(EstimandKind::Mean, 0.05)
                .unwrap()
                .with_delta(delta)
                .unwrap()
                .with_bound(1.0)
                .unwrap(),
        };
        let report = coverage_sim(&scenario).unwrap();
        let cov = report.coverage(0);
        assert!(cov >= 0.92, "split delta={delta}: coverage {cov} below 0.92");
    }
}

#[test]
fn quantile_na_monte_carlo_coverage() {
    // perfect predictions on the labeled side; the set still must cover the
    // true median of the prediction distribution
    let trials = 120;
    let mut covered = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(17_000 + trial);
        let n = 50;
        let big_n = 90;
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let labeled = LabeledSet::from_pairs(y.clone(), y).unwrap();
        let fu: Vec<f64> = (0..big_n).map(|_| rng.gen::<f64>()).collect();
        let unlabeled = UnlabeledSet::from_predictions(fu).unwrap();
        let grid = GridSpec::linear(0.0, 1.0, 15).unwrap();
        let set = pp_quantile_na(
            &labeled,
            &unlabeled,
            0.5,
            BudgetSplit::symmetric(0.1).unwrap(),
            &grid,
        )
        .unwrap();
        // true 0.5-quantile of U(0,1) is 0.5
        if set.hull_1d().unwrap().map(|(lo, hi)| lo <= 0.5 && 0.5 <= hi).unwrap_or(false) {
            covered += 1;
        }
    }
    let coverage = covered as f64 / trials as f64;
    assert!(coverage >= 0.9, "quantile betting coverage {coverage} below 0.9");
}

#[test]
fn classical_width_obeys_root_n_law() {
    // widths should scale like 1/sqrt(n) within 10% across a 16x range
    let mut widths = Vec::new();
    for (i, &n) in [100usize, 400, 1600].iter().enumerate() {
        let scenario = SimScenario {
            generator: Generator::Gaussian { bias: 0.2, noise: 0.3 },
            n,
            big_n: 100,
            trials: 500,
            seed: 19_000 + i as u64,
            estimand: EstimandSpec::new(EstimandKind::Mean, 0.1).unwrap(),
        };
        let report = coverage_sim(&scenario).unwrap();
        widths.push(report.tally(1).mean_width);
    }
    for (i, &(a, b)) in [(0usize, 1usize), (1, 2)].iter().enumerate() {
        let ratio = widths[a] / widths[b];
        assert!(
            (ratio - 2.0).abs() < 0.2,
            "step {i}: width ratio {ratio} off the root-n law by more than 10%"
        );
    }
}

#[test]
fn label_shift_width_shrinks_with_nested_data() {
    // nonincreasing half-width in both the per-class labeled counts and the
    // unlabeled count, averaged over seeds
    let gen = |n_per_class: usize, big_n: usize, seed: u64| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = Vec::new();
        let mut f = Vec::new();
        for _ in 0..n_per_class {
            for class in [1.0, 2.0] {
                y.push(class);
                f.push(if rng.gen::<f64>() < 0.1 { 3.0 - class } else { class });
            }
        }
        let fu: Vec<f64> = (0..big_n)
            .map(|_| {
                let c = if rng.gen::<f64>() < 0.7 { 1.0 } else { 2.0 };
                if rng.gen::<f64>() < 0.1 {
                    3.0 - c
                } else {
                    c
                }
            })
            .collect();
        let labeled = LabeledSet::from_pairs(y, f).unwrap();
        let unlabeled = UnlabeledSet::from_predictions(fu).unwrap();
        label_shift_interval(
            &labeled,
            &unlabeled,
            &[1.0, 0.0],
            BudgetSplit::new(0.1, 0.05).unwrap(),
        )
        .unwrap()
        .interval
        .width()
    };
    for seed in [1u64, 2, 3] {
        let small = gen(40, 500, seed);
        let big = gen(400, 20_000, seed);
        assert!(big < small, "seed {seed}: width {big} not below {small}");
    }
}
