//! General risk minimization beyond convexity: mode estimation and the
//! Tukey biweight robust mean, with the data-splitting retention rule.
//!
//!     cargo run --example risk_minimization

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::nonasymptotic::BudgetSplit;
use ppinfer::riskmin::{mode_loss, pp_risk_min, tukey_loss, SplitPlan};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // bimodal outcomes: 70% near 2.0, 30% near -1.0, plus outliers
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        let r: f64 = rng.gen();
        if r < 0.7 {
            2.0 + rng.gen_range(-0.4..0.4)
        } else if r < 0.97 {
            -1.0 + rng.gen_range(-0.4..0.4)
        } else {
            rng.gen_range(-8.0..8.0) // occasional junk
        }
    };

    let n = 150;
    let big_n = 4_000;
    let mut y = Vec::new();
    let mut f = Vec::new();
    for _ in 0..n {
        let yi = draw(&mut rng);
        y.push(yi);
        f.push(yi + rng.gen_range(-0.15..0.15));
    }
    let fu: Vec<f64> = (0..big_n)
        .map(|_| draw(&mut rng) + rng.gen_range(-0.15..0.15))
        .collect();
    let labeled = LabeledSet::from_pairs(y, f)?;
    let unlabeled = UnlabeledSet::from_predictions(fu)?;

    let split = BudgetSplit::new(0.1, 0.05)?;
    let plan = SplitPlan::seeded(unlabeled.len(), 42)?;

    // mode: which theta has the most mass within +/- 0.5?
    let loss = mode_loss(0.5)?;
    let res = pp_risk_min(&labeled, &unlabeled, &loss, split, &plan)?;
    let retained = res.retained_values();
    println!(
        "mode (eta=0.5): imputed argmin {:.3}; retained {} of {} candidates",
        res.theta[res.imputed_argmin],
        res.retained.len(),
        res.theta.len()
    );
    println!(
        "  retained range [{:.3}, {:.3}] (true mode near 2.0)",
        retained.first().unwrap(),
        retained.last().unwrap()
    );

    // Tukey biweight: outlier-robust location
    let loss = tukey_loss(2.0)?;
    let res = pp_risk_min(&labeled, &unlabeled, &loss, split, &plan)?;
    let retained = res.retained_values();
    println!(
        "tukey (c=2.0): imputed argmin {:.3}; retained range [{:.3}, {:.3}]",
        res.theta[res.imputed_argmin],
        retained.first().unwrap(),
        retained.last().unwrap()
    );
    Ok(())
}
