//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use circlepack::geometry::Point;
use circlepack::nn::Matrix;
use circlepack::packer::EncoderDecoderModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Monte Carlo intersection measure of two radius-`r` balls at distance `d`,
/// sampled uniformly in the lens's bounding box.
pub fn lens_oracle(dim: usize, d: f64, r: f64, samples: u64, seed: u64) -> f64 {
    assert!(d < 2.0 * r);
    let half_height = (r * r - d * d / 4.0).sqrt();
    let (x0, x1) = (d - r, r);
    let box_measure = (x1 - x0) * (2.0 * half_height).powi(dim as i32 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = rng.random_range(x0..x1);
        let mut rest = 0.0;
        for _ in 1..dim {
            let y: f64 = rng.random_range(-half_height..half_height);
            rest += y * y;
        }
        if x * x + rest <= r * r && (x - d) * (x - d) + rest <= r * r {
            hits += 1;
        }
    }
    box_measure * hits as f64 / samples as f64
}

/// Half a unit in the third significant digit of `x`.
pub fn three_sig_fig_tolerance(x: f64) -> f64 {
    0.5 * 10f64.powi(x.abs().log10().floor() as i32 - 2)
}

/// Fifteen spheres in the unit cube on the 1/13 grid: pairwise distances
/// are at least 5/13 and every coordinate is within 4/13 of the center.
pub const CUBE15_GRID: [[i32; 3]; 15] = [
    [-4, 0, -4],
    [-1, -4, -4],
    [0, 0, 0],
    [4, -4, 1],
    [-4, 4, 4],
    [4, 1, -4],
    [0, 4, -4],
    [0, -4, 4],
    [4, 0, 4],
    [4, 4, 0],
    [-4, 4, -1],
    [-4, -4, 0],
    [4, -4, -4],
    [1, 4, 4],
    [-4, -1, 4],
];

pub fn cube15_centers() -> Vec<Point> {
    CUBE15_GRID.iter().map(|p| p.iter().map(|&k| k as f64 / 13.0).collect()).collect()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs())
    })
}

/// Asymptotic one-sample KS critical value.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

pub struct GradientErrors {
    /// Largest relative discrepancy per parameter tensor.
    pub per_tensor: Vec<f64>,
    /// Entries sitting on a ReLU kink, judged against one-sided differences.
    pub kinks: usize,
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Analytic against finite-difference gradients, per parameter tensor, with
/// the perturbations held fixed. Where the forward and backward slopes
/// disagree the loss has a kink at that point (a ReLU pre-activation exactly
/// at zero) and the analytic value must match one of the one-sided slopes.
pub fn model_gradient_errors(model: &EncoderDecoderModel, w: &Matrix, h: f64) -> GradientErrors {
    let (eval, grads) = model.loss_and_grads(w).unwrap();
    let f0 = eval.loss;
    let analytic: Vec<Matrix> = grads.flat().into_iter().cloned().collect();
    let mut probe = model.clone();
    let mut kinks = 0;
    let per_tensor = (0..analytic.len())
        .map(|t| {
            let mut worst: f64 = 0.0;
            for k in 0..analytic[t].as_slice().len() {
                let original = probe.params_mut()[t].as_slice()[k];
                probe.params_mut()[t].as_mut_slice()[k] = original + h;
                let up = probe.loss(w).unwrap();
                probe.params_mut()[t].as_mut_slice()[k] = original - h;
                let down = probe.loss(w).unwrap();
                probe.params_mut()[t].as_mut_slice()[k] = original;
                let a = analytic[t].as_slice()[k];
                let (forward, backward) = ((up - f0) / h, (f0 - down) / h);
                let mut rel = relative(a, (up - down) / (2.0 * h));
                if relative(forward, backward) > 1e-2 {
                    kinks += 1;
                    rel = rel.min(relative(a, forward)).min(relative(a, backward));
                }
                worst = worst.max(rel);
            }
            worst
        })
        .collect();
    GradientErrors { per_tensor, kinks }
}
