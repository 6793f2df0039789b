//! P-values by interval inversion, and the odds-ratio interval propagated
//! from two prediction-powered mean intervals.
//!
//!     cargo run --example pvalues_and_odds

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{EstimandKind, EstimandSpec, LabeledSet, UnlabeledSet};
use ppinfer::estimators::pp_mean;
use ppinfer::odds::odds_ratio_interval;
use ppinfer::pvalue::{pp_p_value, NullSpec};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gen_group = |p: f64, n: usize, big_n: usize, rng: &mut ChaCha8Rng| {
        let flip = 0.05;
        let mut y = Vec::new();
        let mut f = Vec::new();
        for _ in 0..n {
            let yi = (rng.gen::<f64>() < p) as i32 as f64;
            y.push(yi);
            f.push(if rng.gen::<f64>() < flip { 1.0 - yi } else { yi });
        }
        let mut fu = Vec::new();
        for _ in 0..big_n {
            let yi = (rng.gen::<f64>() < p) as i32 as f64;
            fu.push(if rng.gen::<f64>() < flip { 1.0 - yi } else { yi });
        }
        (
            LabeledSet::from_pairs(y, f).unwrap(),
            UnlabeledSet::from_predictions(fu).unwrap(),
        )
    };

    // p-value for H0: mean <= 0.25 when the true mean is 0.35
    let (labeled, unlabeled) = gen_group(0.35, 300, 20_000, &mut rng);
    let spec = EstimandSpec::new(EstimandKind::Mean, 0.05)?;
    for null in [NullSpec::LessEq(0.25), NullSpec::LessEq(0.34), NullSpec::Point(0.35)] {
        let p = pp_p_value(&spec, &labeled, &unlabeled, &null)?;
        println!("null {null:?}: p = {:.5}", p.value);
    }

    // odds ratio between two groups from their mean intervals at 1 - alpha/2
    let alpha = 0.05;
    let (l0, u0) = gen_group(0.22, 250, 15_000, &mut rng);
    let (l1, u1) = gen_group(0.45, 250, 15_000, &mut rng);
    let mu0 = pp_mean(&l0, &u0, alpha / 2.0)?;
    let mu1 = pp_mean(&l1, &u1, alpha / 2.0)?;
    let or = odds_ratio_interval(&mu0, &mu1)?;
    let truth = (0.45 / 0.55) / (0.22 / 0.78);
    println!(
        "odds ratio: [{:.3}, {:.3}] at level {:.3} (true {truth:.3}, covers: {})",
        or.lower,
        or.upper,
        or.level,
        or.contains(truth)
    );
    Ok(())
}
