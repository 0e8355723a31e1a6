//! Train the encoder-decoder packer on seven circles in a circle that is too
//! small for them, and write the record, centers, trace and an SVG.
//!
//! ```text
//! cargo run --release --example pack_circles -- [seed] [out_dir]
//! ```

use circlepack::metrics::trace_export;
use circlepack::packer::{train, PerturbationSpec, TrainConfig};
use circlepack::record::centers_to_csv;
use circlepack::render::{render_svg, RenderStyle};
use circlepack::{Container, PackingInstance};

fn main() -> circlepack::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed must be an integer"));
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "target/pack_circles".into()));
    std::fs::create_dir_all(&out)?;

    // Seven circles of radius 1/3 need a container of radius 1; this one has 0.9.
    let instance = PackingInstance::new(Container::ball(2, 0.9)?, 7, 0.33333)?;
    let config = TrainConfig::default().with_seed(seed);
    let schedule = PerturbationSpec::two_phase(instance.small_radius, config.epochs)?;
    println!("schedule: {}", schedule.describe());

    let record = train(instance, schedule, config)?;
    for row in record.trace.iter().step_by(20) {
        println!(
            "epoch {:>6}  p={:<4}  loss={:>9.4}  overlap={:.5}",
            row.epoch,
            row.p.unwrap(),
            row.loss,
            row.overlap_length
        );
    }
    let m = &record.metrics;
    println!(
        "best overlap {:.5} at epoch {} (final {:.5}), formula density {:.4}, decoder error {:.3}",
        m.best_overlap_length,
        record.best_epoch,
        m.final_overlap_length,
        m.formula_density,
        m.indicator_error.unwrap_or(f64::NAN)
    );

    record.write_json(out.join("record.json"))?;
    std::fs::write(out.join("centers.csv"), centers_to_csv(&record.best_centers))?;
    std::fs::write(out.join("trace.csv"), trace_export(&record))?;
    std::fs::write(out.join("layout.svg"), render_svg(&record.best_layout()?, &RenderStyle::default())?)?;
    println!("wrote {}", out.display());
    Ok(())
}
