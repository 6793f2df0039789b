//! Quantile confidence sets over a grid spanning the predictions.
//!
//!     cargo run --example quantile_set

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::pp_quantile;
use ppinfer::grid::GridSpec;

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    // skewed outcomes: exponential-ish via inverse transform
    let draw = |rng: &mut ChaCha8Rng| -> f64 { -(1.0 - rng.gen::<f64>()).ln() };

    let n = 200;
    let big_n = 5_000;
    let mut y = Vec::new();
    let mut f = Vec::new();
    for _ in 0..n {
        let yi = draw(&mut rng);
        y.push(yi);
        f.push(yi * 1.05 + 0.02); // slightly miscalibrated predictions
    }
    let fu: Vec<f64> = (0..big_n).map(|_| draw(&mut rng) * 1.05 + 0.02).collect();

    let labeled = LabeledSet::from_pairs(y, f)?;
    let unlabeled = UnlabeledSet::from_predictions(fu)?;

    for q in [0.25, 0.5, 0.9] {
        let grid = GridSpec::spanning(unlabeled.predictions(), 1000)?;
        let set = pp_quantile(&labeled, &unlabeled, q, 0.1, &grid)?;
        let truth = -(1.0 - q as f64).ln();
        match set.hull_1d()? {
            Some((lo, hi)) => println!(
                "q={q:<4} set hull [{lo:.4}, {hi:.4}]  ({} of {} grid points; true {truth:.4})",
                set.retained.len(),
                set.grid.len()
            ),
            None => println!("q={q:<4} empty set: model and data conflict at this level"),
        }
    }
    Ok(())
}
