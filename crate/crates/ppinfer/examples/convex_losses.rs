//! The generic convex-estimation pipeline with a custom subgradient, and
//! its agreement with the specialized estimators.
//!
//!     cargo run --example convex_losses

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::{pp_convex, pp_mean, pp_quantile, GradientSpec};
use ppinfer::grid::GridSpec;

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 120;
    let big_n = 3_000;
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..4.0)).collect();
    let f: Vec<f64> = y.iter().map(|v| v + rng.gen_range(-0.3..0.35)).collect();
    let fu: Vec<f64> = (0..big_n)
        .map(|_| rng.gen_range(0.0..4.0) + rng.gen_range(-0.3..0.35))
        .collect();
    let labeled = LabeledSet::from_pairs(y, f)?;
    let unlabeled = UnlabeledSet::from_predictions(fu)?;
    let alpha = 0.1;

    // squared loss: the retained hull tracks the closed-form mean interval
    let iv = pp_mean(&labeled, &unlabeled, alpha)?;
    let grid = GridSpec::linear(iv.lower - 0.5, iv.upper + 0.5, 2000)?;
    let set = pp_convex(&labeled, &unlabeled, &GradientSpec::squared(), alpha, &grid)?;
    let (lo, hi) = set.hull_1d()?.expect("nonempty");
    println!("mean interval:      [{:.4}, {:.4}]", iv.lower, iv.upper);
    println!("squared-loss hull:  [{lo:.4}, {hi:.4}]  (cell {:.4})", grid.axes[0].cell());

    // pinball loss reproduces the quantile set point for point
    let q = 0.7;
    let qgrid = GridSpec::spanning(unlabeled.predictions(), 500)?;
    let direct = pp_quantile(&labeled, &unlabeled, q, alpha, &qgrid)?;
    let generic = pp_convex(&labeled, &unlabeled, &GradientSpec::pinball(q)?, alpha, &qgrid)?;
    println!(
        "pinball q={q}: direct and generic retained sets identical: {}",
        direct.retained == generic.retained
    );

    // a custom convex loss: Huber-style subgradient
    let huber = GradientSpec::new(1, move |theta, _x, v| {
        let r = theta[0] - v;
        vec![r.clamp(-1.0, 1.0)]
    })?;
    let hset = pp_convex(&labeled, &unlabeled, &huber, alpha, &grid)?;
    match hset.hull_1d()? {
        Some((lo, hi)) => println!("huber-loss hull:    [{lo:.4}, {hi:.4}]"),
        None => println!("huber-loss set empty"),
    }
    Ok(())
}
