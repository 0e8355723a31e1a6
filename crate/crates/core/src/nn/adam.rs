use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Bias-corrected Adam with one moment pair per parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub t: u64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
}

impl AdamState {
    /// Zeroed moments shaped like `shapes`, canonical β₁ = 0.9, β₂ = 0.999, ε = 1e−8.
    pub fn new(learning_rate: f64, shapes: &[(usize, usize)]) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
        }
    }

    pub fn for_params(learning_rate: f64, params: &[&mut Matrix]) -> Self {
        let shapes: Vec<_> = params.iter().map(|p| p.shape()).collect();
        Self::new(learning_rate, &shapes)
    }

    pub fn first_moments(&self) -> &[Matrix] {
        &self.m
    }

    pub fn second_moments(&self) -> &[Matrix] {
        &self.v
    }

    pub fn step(&mut self, params: &mut [&mut Matrix], grads: &[&Matrix]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam tracks {} tensors, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        for (k, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != self.m[k].shape() || g.shape() != self.m[k].shape() {
                return Err(Error::Shape(format!("adam tensor {k}")));
            }
        }
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let m = self.m[k].as_mut_slice();
            let v = self.v[k].as_mut_slice();
            for (((x, &gi), mi), vi) in p.as_mut_slice().iter_mut().zip(g.as_slice()).zip(m).zip(v) {
                *mi = self.beta1 * *mi + (1.0 - self.beta1) * gi;
                *vi = self.beta2 * *vi + (1.0 - self.beta2) * gi * gi;
                let mhat = *mi / c1;
                let vhat = *vi / c2;
                *x -= self.learning_rate * mhat / (vhat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> Matrix {
        Matrix::from_vec(1, 1, vec![x]).unwrap()
    }

    #[test]
    fn zero_gradient_is_identity_with_zero_momentum() {
        let mut p = Matrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap();
        let before = p.clone();
        let mut adam = AdamState::new(5e-4, &[(2, 2)]);
        // Arbitrary step count and second moments; first moments zero.
        adam.t = 41;
        adam.v[0] = Matrix::from_rows(&[vec![0.3, 2.0], vec![1e-6, 7.0]]).unwrap();
        let g = Matrix::zeros(2, 2);
        for _ in 0..10 {
            adam.step(&mut [&mut p], &[&g]).unwrap();
        }
        assert_eq!(p, before);
        assert_eq!(adam.t, 51);
    }

    #[test]
    fn first_step_is_signed_learning_rate() {
        let lr = 5e-4;
        for g in [1e-3, -0.7, 42.0, -1e4] {
            let mut p = scalar(0.0);
            let mut adam = AdamState::new(lr, &[(1, 1)]);
            adam.step(&mut [&mut p], &[&scalar(g)]).unwrap();
            let update = p.as_slice()[0];
            assert!((update + lr * g.signum()).abs() < lr * 1e-4, "g={g} update={update}");
            assert!(update.abs() <= lr * (1.0 + 1e-6));
        }
    }

    #[test]
    fn constant_gradient_descends_monotonically() {
        let mut p = scalar(1.0);
        let mut adam = AdamState::new(1e-3, &[(1, 1)]);
        let g = scalar(0.5);
        let mut last = 1.0;
        for _ in 0..1000 {
            adam.step(&mut [&mut p], &[&g]).unwrap();
            let now = p.as_slice()[0];
            assert!(now < last);
            last = now;
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut p = scalar(0.0);
        let mut adam = AdamState::new(1e-3, &[(1, 1)]);
        assert!(adam.step(&mut [&mut p], &[&Matrix::zeros(1, 2)]).is_err());
        assert!(adam.step(&mut [], &[]).is_err());
    }
}
