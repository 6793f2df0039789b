//! Label-shift inference: the class mix changes between the labeled and
//! unlabeled data, and the confusion matrix corrects the prediction
//! distribution.
//!
//!     cargo run --example label_shift

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::nonasymptotic::BudgetSplit;
use ppinfer::shift::{estimate_confusion, label_shift_interval};
use ppinfer::stats::clt_mean_interval;

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let confusion = 0.1;
    let (source_prior, target_prior) = (0.5, 0.75);
    let draw = |prior: f64, rng: &mut ChaCha8Rng| -> (f64, f64) {
        let y = if rng.gen::<f64>() < prior { 1.0 } else { 2.0 };
        let f = if rng.gen::<f64>() < confusion { 3.0 - y } else { y };
        (y, f)
    };

    let n = 800;
    let big_n = 30_000;
    let mut y = Vec::new();
    let mut f = Vec::new();
    for _ in 0..n {
        let (yi, fi) = draw(source_prior, &mut rng);
        y.push(yi);
        f.push(fi);
    }
    let mut fu = Vec::new();
    for _ in 0..big_n {
        fu.push(draw(target_prior, &mut rng).1);
    }
    let labeled = LabeledSet::from_pairs(y, f)?;
    let unlabeled = UnlabeledSet::from_predictions(fu.clone())?;

    let k = estimate_confusion(&labeled, 2)?;
    println!("estimated confusion matrix (columns = true class):");
    for row in &k.matrix {
        println!("  [{:.3}, {:.3}]", row[0], row[1]);
    }

    // nu = (1, 0): the target-population share of class 1
    let res = label_shift_interval(&labeled, &unlabeled, &[1.0, 0.0], BudgetSplit::new(0.1, 0.05)?)?;
    println!("true class-1 share under the target law: {target_prior}");
    println!(
        "label-shift interval: [{:.4}, {:.4}]  covers: {}",
        res.interval.lower,
        res.interval.upper,
        res.interval.contains(target_prior)
    );
    println!(
        "  slacks: confusion {:.4}, empirical distribution {:.4}",
        res.confusion_slack, res.dkwm_slack
    );

    let ones: Vec<f64> = fu.iter().map(|&v| (v == 1.0) as i32 as f64).collect();
    let naive = clt_mean_interval(&ones, 0.1)?;
    println!(
        "uncorrected prediction share: [{:.4}, {:.4}]  covers: {}",
        naive.lower,
        naive.upper,
        naive.contains(target_prior)
    );
    Ok(())
}
