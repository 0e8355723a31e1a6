//! The neural-network layer on its own: fit a small softmax classifier to
//! four Gaussian blobs with backpropagation and Adam.
//!
//! ```text
//! cargo run --release --example dense_network
//! ```

use circlepack::nn::{cross_entropy, Activation, AdamState, Matrix, Network, OutputGrad};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> circlepack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let means = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let per_class = 50;
    let mut inputs = Matrix::zeros(4 * per_class, 2);
    let mut targets = Matrix::zeros(4 * per_class, 4);
    for row in 0..4 * per_class {
        let class = row % 4;
        inputs
            .row_mut(row)
            .copy_from_slice(&[means[class].0 + noise.sample(&mut rng), means[class].1 + noise.sample(&mut rng)]);
        targets[(row, class)] = 1.0;
    }

    let mut net =
        Network::xavier(&[2, 16, 16, 4], &[Activation::ReLU, Activation::Tanh, Activation::SoftMax], &mut rng)?;
    let mut adam = AdamState::for_params(1e-2, &net.params_mut());
    for step in 0..=300 {
        let (pred, tape) = net.forward(&inputs)?;
        if step % 50 == 0 {
            println!("step {step:>3}  loss {:.4}", cross_entropy(&pred, &targets)? / inputs.rows() as f64);
        }
        let logits = pred.zip_map(&targets, |p, t| p - t)?;
        let grads = net.backward(&tape, OutputGrad::Logits(logits))?;
        adam.step(&mut net.params_mut(), &grads.flat())?;
    }

    let (pred, _) = net.forward(&inputs)?;
    let correct = (0..pred.rows())
        .filter(|&i| {
            let row = pred.row(i);
            let argmax = (0..4).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            argmax == i % 4
        })
        .count();
    println!("training accuracy {}/{}", correct, pred.rows());
    Ok(())
}
