//! Compare the encoder-decoder packer with the projected-gradient baseline on
//! one instance, scoring both best layouts with the same Monte Carlo draw.
//!
//! ```text
//! cargo run --release --example baseline_vs_packer -- [N] [R] [r] [seeds]
//! ```

use circlepack::baseline::{baseline_pack, BaselineConfig};
use circlepack::metrics::compare;
use circlepack::packer::{train, PerturbationSpec, TrainConfig};
use circlepack::{Container, PackingInstance};
use rayon::prelude::*;

fn main() -> circlepack::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let count: usize = arg(0, "13").parse().expect("N");
    let big: f64 = arg(1, "0.9").parse().expect("R");
    let r: f64 = arg(2, "0.2360679775").parse().expect("r");
    let seeds: u64 = arg(3, "3").parse().expect("seeds");

    let instance = PackingInstance::new(Container::ball(2, big)?, count, r)?;
    let mut records: Vec<_> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let config = TrainConfig::default().with_seed(seed);
            train(instance, PerturbationSpec::two_phase(r, config.epochs)?, config)
        })
        .collect::<circlepack::Result<_>>()?;
    for seed in 0..seeds {
        records.push(baseline_pack(&instance, &BaselineConfig::default().with_seed(seed))?);
    }

    let report = compare(&instance, &records, 1_000_000, 7)?;
    print!("{}", report.to_text());
    Ok(())
}
