//! Uniform sampling in containers and Monte Carlo union density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{norm2, Container, ContainerKind, Layout, Point};
use crate::error::{Error, Result};

/// Points per deterministic substream. Each chunk reseeds from
/// `(seed, chunk_index)`, so the estimate does not depend on thread count.
const CHUNK: usize = 1 << 16;

/// Uniformly distributed unit vector in R^dim, from normalized Gaussians.
/// A zero-norm draw is resampled.
pub fn uniform_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
    loop {
        let v: Point = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm2(&v);
        if n > 0.0 && n.is_finite() {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `radius · Z^p · V/‖V‖` with `Z ~ U[0, 1]`, `V` standard normal.
///
/// With `p = 1/dim` this is uniform in the ball; other exponents skew the
/// radial law toward the center (`p > 1/dim`) or the boundary.
pub fn sample_in_ball<R: Rng + ?Sized>(radius: f64, p: f64, dim: usize, rng: &mut R) -> Point {
    let dir = uniform_direction(dim, rng);
    let z: f64 = rng.random();
    let scale = radius * z.powf(p);
    dir.into_iter().map(|x| x * scale).collect()
}

/// Uniform sample in the (uneroded) container.
pub fn sample_in_container<R: Rng + ?Sized>(container: &Container, rng: &mut R) -> Point {
    match container.kind {
        ContainerKind::Ball => sample_in_ball(container.extent, 1.0 / container.dim as f64, container.dim, rng),
        ContainerKind::Box => {
            let h = container.extent / 2.0;
            (0..container.dim).map(|_| rng.random_range(-h..=h)).collect()
        }
    }
}

/// Monte Carlo estimate of the fraction of the container covered by the
/// union of the small balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McDensity {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Fraction of samples lying in three or more balls.
    pub triple_fraction: f64,
}

impl McDensity {
    pub fn triple_overlap_detected(&self) -> bool {
        self.triple_fraction > 0.0
    }
}

/// [`mc_density_of`] for a layout.
pub fn mc_density(layout: &Layout, samples: u64, seed: u64) -> Result<McDensity> {
    mc_density_of(&layout.instance.container, layout.instance.small_radius, &layout.centers, samples, seed)
}

/// Draws `samples` points uniformly in `container` and counts those inside at
/// least one ball of radius `r` around `centers`.
pub fn mc_density_of(container: &Container, r: f64, centers: &[Point], samples: u64, seed: u64) -> Result<McDensity> {
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo sample count must be at least 1".into()));
    }
    let chunks = (samples as usize).div_ceil(CHUNK);
    let r2 = r * r;
    let (covered, triple) = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(samples as usize - k * CHUNK);
            let mut covered = 0u64;
            let mut triple = 0u64;
            for _ in 0..len {
                let x = sample_in_container(container, &mut rng);
                let hits = centers
                    .iter()
                    .filter(|c| c.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2)
                    .take(3)
                    .count();
                if hits >= 1 {
                    covered += 1;
                }
                if hits >= 3 {
                    triple += 1;
                }
            }
            (covered, triple)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let p = covered as f64 / m;
    Ok(McDensity { estimate: p, std_error: (p * (1.0 - p) / m).sqrt(), samples, triple_fraction: triple as f64 / m })
}
