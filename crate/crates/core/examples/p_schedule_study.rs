//! Effect of the perturbation exponent: fixed p against a schedule that
//! starts concentrated (p = 2) and ends near the rim (p = 1/5).
//!
//! ```text
//! cargo run --release --example p_schedule_study -- [seeds] [epochs]
//! ```

use circlepack::metrics::Spread;
use circlepack::packer::{train, PerturbationSpec, TrainConfig};
use circlepack::{Container, PackingInstance};
use rayon::prelude::*;

fn main() -> circlepack::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(5, |s| s.parse().expect("seeds"));
    let epochs: usize = args.next().map_or(20_000, |s| s.parse().expect("epochs"));

    let instance = PackingInstance::new(Container::ball(2, 0.9)?, 13, 0.2360679775)?;
    let r = instance.small_radius;
    let variants = [
        ("p = 2", PerturbationSpec::fixed(r, 2.0)?),
        ("p = 1/2", PerturbationSpec::fixed(r, 0.5)?),
        ("p = 1/5", PerturbationSpec::fixed(r, 0.2)?),
        ("p = 1/10", PerturbationSpec::fixed(r, 0.1)?),
        ("2 -> 1/5", PerturbationSpec::two_phase(r, epochs)?),
    ];

    println!("{:<10} {:>12} {:>12} {:>12}", "variant", "min", "median", "max");
    for (label, spec) in &variants {
        let finals: Vec<f64> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let config = TrainConfig::default().with_seed(seed).with_epochs(epochs);
                train(instance, spec.clone(), config).map(|rec| rec.metrics.final_overlap_length)
            })
            .collect::<circlepack::Result<_>>()?;
        let s = Spread::of(&finals).expect("at least one seed");
        println!("{label:<10} {:>12.5} {:>12.5} {:>12.5}", s.min, s.median, s.max);
    }
    Ok(())
}
