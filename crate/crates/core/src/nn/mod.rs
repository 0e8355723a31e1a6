//! A small dense network stack: matrices, activations, Xavier init, exact
//! reverse-mode gradients, cross-entropy and Adam.

mod activation;
mod adam;
mod matrix;
mod network;

pub use activation::{activate, Activation, SELU_ALPHA, SELU_LAMBDA};
pub use adam::AdamState;
pub use matrix::Matrix;
pub use network::{DenseLayer, Gradients, LayerGrad, Network, OutputGrad, Tape};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Probabilities are clamped below at this value inside the logarithm.
pub const LOG_CLAMP: f64 = 1e-12;

/// `out × in` matrix with entries uniform on `[-L, L]`, `L = √(6/(in + out))`.
pub fn xavier_uniform<R: Rng + ?Sized>(out: usize, inp: usize, rng: &mut R) -> Matrix {
    let limit = (6.0 / (inp + out) as f64).sqrt();
    let mut m = Matrix::zeros(out, inp);
    for x in m.as_mut_slice() {
        *x = rng.random_range(-limit..=limit);
    }
    m
}

/// [`xavier_uniform`] from a fresh seeded generator.
pub fn xavier_init(shape: (usize, usize), seed: u64) -> Matrix {
    xavier_uniform(shape.0, shape.1, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Summed cross-entropy `−Σ_i Σ_j t_ij ln p_ij` over a batch of rows.
pub fn cross_entropy(predictions: &Matrix, targets: &Matrix) -> Result<f64> {
    if predictions.shape() != targets.shape() {
        return Err(Error::Shape(format!("predictions {:?} vs targets {:?}", predictions.shape(), targets.shape())));
    }
    Ok(predictions
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .filter(|(_, &t)| t != 0.0)
        .map(|(&p, &t)| -t * p.max(LOG_CLAMP).ln())
        .sum())
}
