//! Inference on a fixed finite population: every prediction is known, a
//! uniformly sampled subset is labeled, and the estimand is the value the
//! full census would give.
//!
//!     cargo run --example finite_population

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::finite_pop::{fp_pp_mean, fp_pp_quantile, FinitePopulation, FpMethod};
use ppinfer::grid::GridSpec;

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let big_n = 2_000;
    // fixed population of outcomes and model predictions for each unit
    let outcomes: Vec<f64> = (0..big_n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let predictions: Vec<f64> = outcomes
        .iter()
        .map(|y| (y + rng.gen_range(-0.1..0.12)).clamp(0.0, 1.0))
        .collect();
    let truth = outcomes.iter().sum::<f64>() / big_n as f64;

    // label a uniform subset of 150 units
    let mut idx: Vec<usize> = (0..big_n).collect();
    idx.shuffle(&mut rng);
    idx.truncate(150);
    let labeled_outcomes: Vec<f64> = idx.iter().map(|&i| outcomes[i]).collect();
    let pop = FinitePopulation::new(predictions, None, idx, labeled_outcomes)?;

    println!("population mean (census value): {truth:.4}");
    let clt = fp_pp_mean(&pop, 0.1, &FpMethod::Clt)?;
    println!(
        "clt interval: [{:.4}, {:.4}]  covers: {}",
        clt.lower,
        clt.upper,
        clt.contains(truth)
    );
    let wsr = fp_pp_mean(
        &pop,
        0.1,
        &FpMethod::Wsr { outcome_low: 0.0, outcome_high: 1.0, shuffle_seed: 3 },
    )?;
    println!(
        "wsr interval: [{:.4}, {:.4}]  covers: {}  (nonasymptotic)",
        wsr.lower,
        wsr.upper,
        wsr.contains(truth)
    );

    let grid = GridSpec::spanning(pop.predictions(), 600)?;
    let set = fp_pp_quantile(&pop, 0.5, 0.1, &grid, &FpMethod::Clt)?;
    if let Some((lo, hi)) = set.hull_1d()? {
        println!("median set hull: [{lo:.4}, {hi:.4}]");
    }
    Ok(())
}
