//! Logistic-regression coefficient sets and the rectified point estimate.
//!
//!     cargo run --example logistic_set

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::{
    default_glm_grid, pp_logistic, pp_point_estimate, GlmLink, PointLoss,
};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let true_theta = [0.8, -0.5];
    let sigmoid = |t: f64| 1.0 / (1.0 + (-t).exp());

    // features in [-1, 1]^2; predictions are soft probabilities from a
    // slightly corrupted model
    let gen = |rows: usize, rng: &mut ChaCha8Rng| -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut fs = Vec::new();
        for _ in 0..rows {
            let x = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p = sigmoid(x[0] * true_theta[0] + x[1] * true_theta[1]);
            let y = (rng.gen::<f64>() < p) as i32 as f64;
            let fhat = (p + rng.gen_range(-0.08..0.08)).clamp(0.01, 0.99);
            xs.push(x);
            ys.push(y);
            fs.push(fhat);
        }
        (xs, ys, fs)
    };

    let (xl, yl, fl) = gen(250, &mut rng);
    let (xu, _yu, fu) = gen(4_000, &mut rng);
    let labeled = LabeledSet::new(Some(xl), yl, fl)?;
    let unlabeled = UnlabeledSet::new(Some(xu), fu)?;

    let estimate = pp_point_estimate(&labeled, &unlabeled, &PointLoss::Glm(GlmLink::Logistic))?;
    println!("true theta:      [{:+.3}, {:+.3}]", true_theta[0], true_theta[1]);
    println!("point estimate:  [{:+.3}, {:+.3}]", estimate[0], estimate[1]);

    let grid = default_glm_grid(&labeled, &unlabeled, GlmLink::Logistic, 60)?;
    let set = pp_logistic(&labeled, &unlabeled, 0.1, &grid)?;
    println!(
        "confidence set: {} of {} lattice points retained at level {:.2}",
        set.retained.len(),
        set.grid.len(),
        set.level
    );
    // per-coordinate extent of the retained lattice
    for j in 0..2 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in set.retained_points() {
            lo = lo.min(p[j]);
            hi = hi.max(p[j]);
        }
        println!("  theta[{j}] in [{lo:+.3}, {hi:+.3}]");
    }
    Ok(())
}
