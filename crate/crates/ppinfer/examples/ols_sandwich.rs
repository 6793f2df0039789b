//! OLS coefficient intervals with sandwich variances, robust to
//! heteroskedastic residuals.
//!
//!     cargo run --example ols_sandwich

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppinfer::data::{LabeledSet, UnlabeledSet};
use ppinfer::estimators::{pp_ols, pp_point_estimate, PointLoss};

fn main() -> ppinfer::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let true_theta = [1.5, -0.75]; // intercept, slope

    let gen = |rows: usize, rng: &mut ChaCha8Rng| -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut fs = Vec::new();
        for _ in 0..rows {
            let z: f64 = rng.gen_range(-2.0..2.0);
            // heteroskedastic noise growing with |z|
            let y = true_theta[0] + true_theta[1] * z + (0.2 + 0.3 * z.abs()) * normal(rng);
            let fhat = y + 0.15 + 0.1 * normal(rng); // biased predictions
            xs.push(vec![1.0, z]);
            ys.push(y);
            fs.push(fhat);
        }
        (xs, ys, fs)
    };

    let (xl, yl, fl) = gen(120, &mut rng);
    let (xu, _, fu) = gen(12_000, &mut rng);
    let labeled = LabeledSet::new(Some(xl), yl, fl)?;
    let unlabeled = UnlabeledSet::new(Some(xu), fu)?;

    let point = pp_point_estimate(&labeled, &unlabeled, &PointLoss::Ols)?;
    println!("true:  intercept {:+.3}  slope {:+.3}", true_theta[0], true_theta[1]);
    println!("point: intercept {:+.3}  slope {:+.3}", point[0], point[1]);
    for (j, name) in [(0usize, "intercept"), (1, "slope")] {
        let iv = pp_ols(&labeled, &unlabeled, j, 0.05)?;
        println!(
            "{name}: [{:+.4}, {:+.4}]  covers truth: {}",
            iv.lower,
            iv.upper,
            iv.contains(true_theta[j])
        );
    }
    Ok(())
}
