//! The perturbation `W = r·Z^p·V/‖V‖`: histogram of `‖W‖/r` for several p
//! next to the exact law `P(‖W‖/r ≤ u) = u^(1/p)`.
//!
//! ```text
//! cargo run --release --example perturbation_law
//! ```

use circlepack::geometry::norm2;
use circlepack::packer::sample_perturbation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let draws = 100_000;
    let bins = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for p in [2.0, 0.5, 0.2, 0.0] {
        let mut counts = vec![0usize; bins];
        for _ in 0..draws {
            let u = norm2(&sample_perturbation(1.0, p, 2, &mut rng));
            counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
        }
        println!("p = {p}");
        for (k, c) in counts.iter().enumerate() {
            let (lo, hi) = (k as f64 / bins as f64, (k + 1) as f64 / bins as f64);
            let expected = if p == 0.0 {
                if k == bins - 1 {
                    1.0
                } else {
                    0.0
                }
            } else {
                hi.powf(1.0 / p) - lo.powf(1.0 / p)
            };
            let observed = *c as f64 / draws as f64;
            println!(
                "  [{lo:.1}, {hi:.1})  {observed:.4}  expected {expected:.4}  {}",
                "#".repeat((observed * 100.0) as usize)
            );
        }
    }
}
