//! The encoder-perturbation-decoder packer.
//!
//! Each circle index `i` is fed to the encoder as a one-hot vector. The
//! encoder's tanh output `b_i` is scaled elementwise by a learnable `α_i`
//! clipped to the eroded container, giving a center that is feasible by
//! construction. A random offset `W` supported on the radius-`r` ball is
//! added, and the decoder must recover `i` from the perturbed point.
//! Minimizing the classification loss pushes centers apart.

mod model;
mod perturbation;
mod train;

pub use model::{EncoderDecoderModel, LossEval, ModelGrads, Widths};
pub use perturbation::{sample_perturbation, scheduled_p, PerturbationSpec};
pub use train::{
    default_schedule, draw_perturbation_batch, indicator_error, train, Checkpoint, EpochStats, TrainConfig, Trainer,
    CHECKPOINT_SCHEMA,
};
