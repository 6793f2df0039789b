//! Covariate-shift-robust estimation: both samples come from the source
//! law; a known Radon-Nikodym weight defines the shifted target estimand.
//!
//!     cargo run --example covariate_shift

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::GradientSpec;
use ppinfer::grid::GridSpec;
use ppinfer::shift::{pp_convex_covshift, WeightFunction};
use ppinfer::stats::clt_mean_interval;

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };

    // source law: two groups equally likely; target law reweights them
    // 0.8 : 0.2, mirroring a survey oversampling one subpopulation
    let (q1, q0) = (0.8, 0.2);
    let truth = q1 * 1.0 + q0 * (-1.0);
    let gen = |rows: usize, rng: &mut ChaCha8Rng| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut fs = Vec::new();
        for _ in 0..rows {
            let g = rng.gen::<f64>() < 0.5;
            let m = if g { 1.0 } else { -1.0 };
            let y = m + normal(rng);
            xs.push(vec![g as i32 as f64]);
            ys.push(y);
            fs.push(y + 0.3 + 0.2 * normal(rng)); // biased predictor
        }
        (xs, ys, fs)
    };
    let (xl, yl, fl) = gen(200, &mut rng);
    let (xu, _, fu) = gen(5_000, &mut rng);
    let labeled = LabeledSet::new(Some(xl), yl, fl)?;
    let unlabeled = UnlabeledSet::new(Some(xu), fu.clone())?;

    // w(x) = dQ/dP: group 1 carries 0.8/0.5, group 0 carries 0.2/0.5
    let weights = WeightFunction::new(move |x: &[f64]| if x[0] > 0.5 { q1 / 0.5 } else { q0 / 0.5 });
    let grid = GridSpec::linear(truth - 3.0, truth + 3.0, 1200)?;
    let set = pp_convex_covshift(
        &labeled,
        &unlabeled,
        GradientSpec::squared(),
        weights,
        0.1,
        &grid,
    )?;
    let (lo, hi) = set.hull_1d()?.expect("nonempty");
    println!("target-law mean: {truth:.3}");
    println!("weighted pp set hull: [{lo:.4}, {hi:.4}]  covers: {}", lo <= truth && truth <= hi);

    let naive = clt_mean_interval(&fu, 0.1)?;
    println!(
        "unweighted imputation: [{:.4}, {:.4}]  covers: {}  <- wrong population",
        naive.lower,
        naive.upper,
        naive.contains(truth)
    );
    Ok(())
}
