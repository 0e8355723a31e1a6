use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{norm2, ContainerKind, PackingInstance, Point};
use crate::nn::{cross_entropy, Activation, Matrix, Network, OutputGrad};

/// Hidden widths of the two networks. `None` means `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Widths {
    pub encoder: Option<usize>,
    pub decoder: Option<usize>,
}

/// Encoder `[N → h SeLU → h SeLU → n tanh]`, the normalization `c_i = b_i ⊙ α_i`
/// and decoder `[n → h ReLU → h ReLU → N SoftMax]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderDecoderModel {
    pub instance: PackingInstance,
    pub encoder: Network,
    /// `N × n`, row `i` is `α_i`.
    pub alpha: Matrix,
    pub decoder: Network,
}

/// Gradients for every trainable tensor of the model.
#[derive(Debug, Clone)]
pub struct ModelGrads {
    pub encoder: Vec<Matrix>,
    pub alpha: Matrix,
    pub decoder: Vec<Matrix>,
}

impl ModelGrads {
    pub fn flat(&self) -> Vec<&Matrix> {
        self.encoder.iter().chain(std::iter::once(&self.alpha)).chain(&self.decoder).collect()
    }
}

/// Output of one forward/backward pass with given perturbations.
#[derive(Debug, Clone)]
pub struct LossEval {
    pub loss: f64,
    /// Centers before perturbation, `N × n`.
    pub centers: Matrix,
    /// Perturbed decoder inputs, one row per (draw, circle).
    pub perturbed: Matrix,
    /// Decoder outputs, rows aligned with `perturbed`.
    pub predictions: Matrix,
}

impl EncoderDecoderModel {
    pub fn new<R: Rng + ?Sized>(instance: PackingInstance, widths: Widths, rng: &mut R) -> Result<Self> {
        let n_obj = instance.count;
        let dim = instance.dim();
        let he = widths.encoder.unwrap_or(n_obj);
        let hd = widths.decoder.unwrap_or(n_obj);
        if he == 0 || hd == 0 {
            return Err(Error::InvalidArgument("hidden widths must be positive".into()));
        }
        let encoder =
            Network::xavier(&[n_obj, he, he, dim], &[Activation::SeLU, Activation::SeLU, Activation::Tanh], rng)?;
        let decoder =
            Network::xavier(&[dim, hd, hd, n_obj], &[Activation::ReLU, Activation::ReLU, Activation::SoftMax], rng)?;
        let bound = instance.center_bound();
        let mut alpha = Matrix::zeros(n_obj, dim);
        for a in alpha.as_mut_slice() {
            let magnitude = rng.random_range(0.5 * bound..=0.9 * bound);
            *a = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        }
        let mut model = Self { instance, encoder, alpha, decoder };
        model.project_alpha();
        Ok(model)
    }

    pub fn count(&self) -> usize {
        self.instance.count
    }

    pub fn dim(&self) -> usize {
        self.instance.dim()
    }

    /// Clips each `α_i` to the eroded container: norm clipping for a ball,
    /// value clipping for a box.
    pub fn project_alpha(&mut self) {
        let bound = self.instance.center_bound();
        let kind = self.instance.container.kind;
        for i in 0..self.alpha.rows() {
            let row = self.alpha.row_mut(i);
            match kind {
                ContainerKind::Ball => {
                    let n = norm2(row);
                    if n > bound {
                        let mut s = bound / n;
                        // Rounding can leave the rescaled norm an ulp above the bound.
                        while norm2(&row.iter().map(|x| x * s).collect::<Vec<_>>()) > bound {
                            s = s.next_down();
                        }
                        row.iter_mut().for_each(|x| *x *= s);
                    }
                }
                ContainerKind::Box => row.iter_mut().for_each(|x| *x = x.clamp(-bound, bound)),
            }
        }
    }

    /// Whether every `α_i` satisfies the container bound exactly.
    pub fn alpha_feasible(&self) -> bool {
        let bound = self.instance.center_bound();
        (0..self.alpha.rows()).all(|i| self.instance.container.constraint_norm(self.alpha.row(i)) <= bound)
    }

    /// Encoder pre-normalization outputs `b_i ∈ [-1, 1]^n` for the identity batch.
    fn encode_raw(&self) -> Result<(Matrix, crate::nn::Tape)> {
        self.encoder.forward(&Matrix::identity(self.count()))
    }

    /// Centers `c_i = b_i ⊙ α_i` for the identity batch.
    pub fn encode_centers(&self) -> Result<Vec<Point>> {
        let (b, _) = self.encode_raw()?;
        Ok(b.zip_map(&self.alpha, |b, a| b * a)?.to_rows())
    }

    /// Decoder input batch: row `d·N + i` is `c_i + W_{d,i}`.
    fn perturb(centers: &Matrix, perturbations: &Matrix) -> Result<Matrix> {
        let n = centers.rows();
        if perturbations.cols() != centers.cols()
            || !perturbations.rows().is_multiple_of(n)
            || perturbations.rows() == 0
        {
            return Err(Error::Shape(format!(
                "perturbations {:?} for centers {:?}",
                perturbations.shape(),
                centers.shape()
            )));
        }
        let mut out = perturbations.clone();
        for row in 0..out.rows() {
            for (x, c) in out.row_mut(row).iter_mut().zip(centers.row(row % n)) {
                *x += c;
            }
        }
        Ok(out)
    }

    fn stacked_targets(n: usize, draws: usize) -> Matrix {
        let mut t = Matrix::zeros(n * draws, n);
        for row in 0..n * draws {
            t[(row, row % n)] = 1.0;
        }
        t
    }

    /// Loss only, for fixed perturbations. Averaged over draws.
    pub fn loss(&self, perturbations: &Matrix) -> Result<f64> {
        let (b, _) = self.encode_raw()?;
        let centers = b.zip_map(&self.alpha, |b, a| b * a)?;
        let input = Self::perturb(&centers, perturbations)?;
        let (pred, _) = self.decoder.forward(&input)?;
        let draws = perturbations.rows() / self.count();
        Ok(cross_entropy(&pred, &Self::stacked_targets(self.count(), draws))? / draws as f64)
    }

    /// Loss and exact gradients for fixed perturbations, treating `W` as a
    /// constant so `∂c̃/∂c` is the identity.
    pub fn loss_and_grads(&self, perturbations: &Matrix) -> Result<(LossEval, ModelGrads)> {
        let n = self.count();
        let (b, enc_tape) = self.encode_raw()?;
        let centers = b.zip_map(&self.alpha, |b, a| b * a)?;
        let input = Self::perturb(&centers, perturbations)?;
        let (pred, dec_tape) = self.decoder.forward(&input)?;
        let draws = perturbations.rows() / n;
        let targets = Self::stacked_targets(n, draws);
        let scale = 1.0 / draws as f64;
        let loss = cross_entropy(&pred, &targets)? * scale;

        let logit_grad = pred.zip_map(&targets, |p, t| (p - t) * scale)?;
        let dec = self.decoder.backward(&dec_tape, OutputGrad::Logits(logit_grad))?;

        let mut d_centers = Matrix::zeros(n, self.dim());
        for row in 0..dec.input.rows() {
            for (acc, g) in d_centers.row_mut(row % n).iter_mut().zip(dec.input.row(row)) {
                *acc += g;
            }
        }
        let d_alpha = d_centers.zip_map(&b, |g, b| g * b)?;
        let d_b = d_centers.zip_map(&self.alpha, |g, a| g * a)?;
        let enc = self.encoder.backward(&enc_tape, OutputGrad::Output(d_b))?;

        let grads = ModelGrads {
            encoder: enc.flat().into_iter().cloned().collect(),
            alpha: d_alpha,
            decoder: dec.flat().into_iter().cloned().collect(),
        };
        Ok((LossEval { loss, centers, perturbed: input, predictions: pred }, grads))
    }

    /// Mutable views in the order of [`ModelGrads::flat`].
    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = self.encoder.params_mut();
        out.push(&mut self.alpha);
        out.extend(self.decoder.params_mut());
        out
    }

    /// Decoded class for each row of `inputs`.
    pub fn decode_argmax(&self, inputs: &Matrix) -> Result<Vec<usize>> {
        let (pred, _) = self.decoder.forward(inputs)?;
        Ok((0..pred.rows())
            .map(|i| {
                pred.row(i)
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (j, &v)| if v > best.1 { (j, v) } else { best })
                    .0
            })
            .collect())
    }
}
