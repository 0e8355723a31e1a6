use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{xavier_uniform, Activation, Matrix};
use crate::error::{Error, Result};

/// Fully connected layer: `post = act(input · weightsᵀ + bias)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `out × in`.
    pub weights: Matrix,
    /// `1 × out`.
    pub bias: Matrix,
    pub activation: Activation,
}

impl DenseLayer {
    /// Xavier-uniform weights, zero bias.
    pub fn xavier<R: Rng + ?Sized>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        Self { weights: xavier_uniform(outputs, inputs, rng), bias: Matrix::zeros(1, outputs), activation }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }
}

/// Values cached by [`Network::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    version: u64,
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
    post: Vec<Matrix>,
}

impl Tape {
    pub fn output(&self) -> &Matrix {
        self.post.last().expect("tape of a non-empty network")
    }

    pub fn pre_activations(&self) -> &[Matrix] {
        &self.pre
    }
}

/// Where backpropagation starts.
#[derive(Debug, Clone)]
pub enum OutputGrad {
    /// `dL/d(output)`, the post-activation of the last layer.
    Output(Matrix),
    /// `dL/d(pre-activation of the last layer)`. Used for the fused
    /// softmax–cross-entropy gradient `ê − e`.
    Logits(Matrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Matrix,
    pub bias: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
    /// `dL/d(input)`, one row per sample.
    pub input: Matrix,
}

impl Gradients {
    /// Gradients in the same order as [`Network::params_mut`].
    pub fn flat(&self) -> Vec<&Matrix> {
        self.layers.iter().flat_map(|g| [&g.weights, &g.bias]).collect()
    }
}

/// A chain of dense layers. Any parameter mutation bumps `version`, so tapes
/// recorded before an update are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<DenseLayer>,
    #[serde(default)]
    version: u64,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network needs at least one layer".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.bias.shape() != (1, l.outputs()) {
                return Err(Error::Shape(format!("layer {k} bias shape {:?}", l.bias.shape())));
            }
            if k > 0 && layers[k - 1].outputs() != l.inputs() {
                return Err(Error::Shape(format!(
                    "layer {k} expects {} inputs but layer {} produces {}",
                    l.inputs(),
                    k - 1,
                    layers[k - 1].outputs()
                )));
            }
            if l.activation == Activation::SoftMax && k + 1 != layers.len() {
                return Err(Error::Shape(format!("SoftMax only allowed on the final layer (layer {k})")));
            }
            l.weights.check_finite()?;
            l.bias.check_finite()?;
        }
        Ok(Self { layers, version: 0 })
    }

    /// `widths[0]` inputs, then one layer per remaining width.
    pub fn xavier<R: Rng + ?Sized>(widths: &[usize], activations: &[Activation], rng: &mut R) -> Result<Self> {
        if widths.len() != activations.len() + 1 {
            return Err(Error::Shape("need one activation per layer".into()));
        }
        let layers = widths.windows(2).zip(activations).map(|(w, &a)| DenseLayer::xavier(w[0], w[1], a, rng)).collect();
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn outputs(&self) -> usize {
        self.layers.last().unwrap().outputs()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Weights and biases, layer by layer.
    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        self.version += 1;
        self.layers.iter_mut().flat_map(|l| [&mut l.weights, &mut l.bias]).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.as_slice().len()).sum()
    }

    /// Runs a batch (one sample per row) through every layer.
    pub fn forward(&self, input: &Matrix) -> Result<(Matrix, Tape)> {
        if input.cols() != self.inputs() {
            return Err(Error::Shape(format!("network expects {} inputs, got {}", self.inputs(), input.cols())));
        }
        input.check_finite()?;
        let mut tape = Tape {
            version: self.version,
            inputs: Vec::with_capacity(self.layers.len()),
            pre: Vec::with_capacity(self.layers.len()),
            post: Vec::with_capacity(self.layers.len()),
        };
        let mut x = input.clone();
        for l in &self.layers {
            let mut z = x.matmul_t(&l.weights)?;
            z.add_row(&l.bias)?;
            // ReLU would otherwise silently map NaN to zero.
            z.check_finite()?;
            let a = l.activation.forward(&z);
            tape.inputs.push(x);
            tape.pre.push(z);
            x = a.clone();
            tape.post.push(a);
        }
        x.check_finite()?;
        Ok((x, tape))
    }

    /// Reverse-mode gradients of a scalar loss given its gradient at the output.
    pub fn backward(&self, tape: &Tape, seed: OutputGrad) -> Result<Gradients> {
        if tape.version != self.version || tape.pre.len() != self.layers.len() {
            return Err(Error::StaleTape);
        }
        let last = self.layers.len() - 1;
        let mut delta = match seed {
            OutputGrad::Output(g) => {
                if g.shape() != tape.post[last].shape() {
                    return Err(Error::Shape("output gradient".into()));
                }
                self.layers[last].activation.backward(&tape.pre[last], &tape.post[last], &g)?
            }
            OutputGrad::Logits(g) => {
                if g.shape() != tape.pre[last].shape() {
                    return Err(Error::Shape("logit gradient".into()));
                }
                g
            }
        };
        let mut grads = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let l = &self.layers[k];
            let dw = delta.t_matmul(&tape.inputs[k])?;
            let db = delta.sum_rows();
            let dx = delta.matmul(&l.weights)?;
            grads.push(LayerGrad { weights: dw, bias: db });
            if k == 0 {
                grads.reverse();
                return Ok(Gradients { layers: grads, input: dx });
            }
            let below = &self.layers[k - 1];
            delta = below.activation.backward(&tape.pre[k - 1], &tape.post[k - 1], &dx)?;
        }
        unreachable!()
    }
}
