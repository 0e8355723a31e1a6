use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

// Self-normalizing constants.
pub const SELU_LAMBDA: f64 = 1.0507009873554805;
pub const SELU_ALPHA: f64 = 1.6732632423543772;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    SeLU,
    Tanh,
    ReLU,
    SoftMax,
    Identity,
}

fn selu(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA * x
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp_m1()
    }
}

fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in row.iter_mut() {
        *x /= sum;
    }
}

/// Applies `kind` to a single vector.
pub fn activate(x: &[f64], kind: Activation) -> Result<Vec<f64>> {
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("activation input {v}")));
    }
    let mut out = x.to_vec();
    kind.apply_row(&mut out);
    Ok(out)
}

impl Activation {
    fn apply_row(self, row: &mut [f64]) {
        match self {
            Activation::SeLU => row.iter_mut().for_each(|x| *x = selu(*x)),
            Activation::Tanh => row.iter_mut().for_each(|x| *x = x.tanh()),
            Activation::ReLU => row.iter_mut().for_each(|x| *x = x.max(0.0)),
            Activation::SoftMax => softmax_in_place(row),
            Activation::Identity => {}
        }
    }

    /// Row-wise activation of a batch (one sample per row).
    pub fn forward(self, pre: &Matrix) -> Matrix {
        let mut out = pre.clone();
        for i in 0..out.rows() {
            self.apply_row(out.row_mut(i));
        }
        out
    }

    /// Given `dL/d(post)`, returns `dL/d(pre)`.
    pub fn backward(self, pre: &Matrix, post: &Matrix, grad_post: &Matrix) -> Result<Matrix> {
        match self {
            Activation::SeLU => pre
                .zip_map(grad_post, |z, g| g * if z > 0.0 { SELU_LAMBDA } else { SELU_LAMBDA * SELU_ALPHA * z.exp() }),
            Activation::Tanh => post.zip_map(grad_post, |a, g| g * (1.0 - a * a)),
            Activation::ReLU => pre.zip_map(grad_post, |z, g| if z > 0.0 { g } else { 0.0 }),
            Activation::Identity => pre.zip_map(grad_post, |_, g| g),
            Activation::SoftMax => {
                let mut out = grad_post.clone();
                if post.shape() != grad_post.shape() {
                    return Err(Error::Shape("softmax backward".into()));
                }
                for i in 0..post.rows() {
                    let s = post.row(i);
                    let dot: f64 = s.iter().zip(grad_post.row(i)).map(|(a, b)| a * b).sum();
                    for (o, a) in out.row_mut(i).iter_mut().zip(s) {
                        *o = a * (*o - dot);
                    }
                }
                Ok(out)
            }
        }
    }
}
