//! Finite-sample-valid prediction-powered mean interval: betting CIs on
//! both the predictions and the rectifier, combined by a budget split.
//!
//!     cargo run --example nonasymptotic_mean

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::pp_mean;
use ppinfer::nonasymptotic::{pp_mean_na, BudgetSplit};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = 0.3;
    let flip_prob = 0.08;
    let flip = |v: f64, rng: &mut ChaCha8Rng| {
        if rng.gen::<f64>() < flip_prob {
            1.0 - v
        } else {
            v
        }
    };

    let n = 120;
    let big_n = 10_000;
    let mut y = Vec::new();
    let mut f = Vec::new();
    for _ in 0..n {
        let yi = (rng.gen::<f64>() < p) as i32 as f64;
        y.push(yi);
        let fi = flip(yi, &mut rng);
        f.push(fi);
    }
    let mut fu = Vec::new();
    for _ in 0..big_n {
        let yi = (rng.gen::<f64>() < p) as i32 as f64;
        fu.push(flip(yi, &mut rng));
    }
    let labeled = LabeledSet::from_pairs(y, f)?;
    let unlabeled = UnlabeledSet::from_predictions(fu)?;

    let alpha = 0.05;
    for delta in [0.01, 0.025, 0.04] {
        let split = BudgetSplit::new(alpha, delta)?;
        let iv = pp_mean_na(&labeled, &unlabeled, split, 1.0)?;
        println!(
            "delta={delta:<6} [{:.4}, {:.4}]  width {:.4}  covers {p}: {}",
            iv.lower,
            iv.upper,
            iv.width(),
            iv.contains(p)
        );
    }
    let asymptotic = pp_mean(&labeled, &unlabeled, alpha)?;
    println!(
        "asymptotic    [{:.4}, {:.4}]  width {:.4}  (CLT, for comparison)",
        asymptotic.lower,
        asymptotic.upper,
        asymptotic.width()
    );
    Ok(())
}
