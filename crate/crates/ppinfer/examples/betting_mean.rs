//! Nonasymptotic betting intervals for a bounded mean: i.i.d. sampling and
//! sampling without replacement from a finite population.
//!
//!     cargo run --example betting_mean

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::betting::{wsr_finite_pop_ci, wsr_mean_ci, BettingConfig};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // i.i.d. Bernoulli(0.3) observations in [0, 1]
    let samples: Vec<f64> = (0..400)
        .map(|_| (rng.gen::<f64>() < 0.3) as i32 as f64)
        .collect();
    let config = BettingConfig::new(0.05, 0.0, 1.0)?;
    for t in [50, 100, 400] {
        let iv = wsr_mean_ci(&samples[..t], &config)?;
        println!(
            "iid  n={t:<4} [{:.4}, {:.4}]  width {:.4}  covers 0.3: {}",
            iv.lower,
            iv.upper,
            iv.width(),
            iv.contains(0.3)
        );
    }

    // finite population: 500 units, 30% ones, sampled without replacement
    let mut pop: Vec<f64> = (0..500).map(|i| (i < 150) as i32 as f64).collect();
    for i in (1..pop.len()).rev() {
        pop.swap(i, rng.gen_range(0..=i));
    }
    let truth = 0.3;
    for t in [50, 150, 450] {
        let iv = wsr_finite_pop_ci(&pop[..t], pop.len(), &config)?;
        println!(
            "wor  n={t:<4} [{:.4}, {:.4}]  width {:.4}  covers {truth}: {}",
            iv.lower,
            iv.upper,
            iv.width(),
            iv.contains(truth)
        );
    }
    println!("the without-replacement interval collapses as the census completes");
    Ok(())
}
