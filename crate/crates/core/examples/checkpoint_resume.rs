//! Stop a training run halfway, serialize it, and resume: the resumed run
//! produces exactly the record of an uninterrupted one.
//!
//! ```text
//! cargo run --release --example checkpoint_resume
//! ```

use circlepack::packer::{Checkpoint, PerturbationSpec, TrainConfig, Trainer};
use circlepack::{Container, PackingInstance};

fn main() -> circlepack::Result<()> {
    let instance = PackingInstance::new(Container::ball(2, 1.0)?, 4, 0.39)?;
    let config = TrainConfig::default().with_seed(5).with_epochs(4000);
    let schedule = PerturbationSpec::two_phase(instance.small_radius, config.epochs)?;

    let uninterrupted = Trainer::new(instance, schedule.clone(), config.clone())?.run()?;

    let mut trainer = Trainer::new(instance, schedule, config)?;
    for _ in 0..1500 {
        trainer.train_epoch()?;
    }
    let json = trainer.checkpoint().to_json()?;
    println!("checkpoint at epoch {}: {} bytes", trainer.epoch(), json.len());
    drop(trainer);

    let resumed = Trainer::from_checkpoint(Checkpoint::from_json(&json)?)?.run()?;
    println!(
        "best overlap: uninterrupted {:.6e}, resumed {:.6e}",
        uninterrupted.best_overlap_length(),
        resumed.best_overlap_length()
    );
    println!("records identical: {}", resumed == uninterrupted);
    Ok(())
}
