//! Direct minimization of pairwise overlap over the centers: projected
//! gradient descent on `Σ_{i<j} max(0, 2r − ‖c_i − c_j‖)²` with random
//! restarts. Reported metrics use the unsquared overlap length.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    distance, project_center, sample_in_ball, total_overlap_of, ContainerKind, Layout, OverlapMeasure, PackingInstance,
    Point,
};
use crate::record::{MethodConfig, RunMetrics, RunRecord, TraceRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub restarts: usize,
    /// Iterates per restart, counting the random initial layout.
    pub iters: usize,
    /// Initial step, as a multiple of the small radius.
    pub step_size: f64,
    /// Step multiplier applied every `decay_every` iterations.
    pub decay: f64,
    pub decay_every: usize,
    pub rng_seed: u64,
    pub snapshot_every: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            iters: 20_000,
            step_size: 0.05,
            decay: 0.995,
            decay_every: 100,
            rng_seed: 0,
            snapshot_every: 100,
        }
    }
}

impl BaselineConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iters == 0 {
            return Err(Error::InvalidArgument("restarts and iters must be at least 1".into()));
        }
        if self.decay_every == 0 || self.snapshot_every == 0 {
            return Err(Error::InvalidArgument("decay_every and snapshot_every must be positive".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) || !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidArgument("step_size must be positive and decay in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone)]
pub struct RestartResult {
    pub index: usize,
    pub centers: Vec<Point>,
    pub overlap_length: f64,
    pub trace: Vec<TraceRow>,
}

/// `Σ_{i<j} max(0, 2r − d_ij)²`.
pub fn squared_hinge(centers: &[Point], r: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let e = 2.0 * r - distance(&centers[i], &centers[j]);
            if e > 0.0 {
                total += e * e;
            }
        }
    }
    total
}

/// Gradient of [`squared_hinge`]. Coincident centers are pushed apart along
/// a fixed axis determined by their indices.
pub fn squared_hinge_grad(centers: &[Point], r: f64) -> Vec<Point> {
    let dim = centers.first().map_or(0, Vec::len);
    let mut grad = vec![vec![0.0; dim]; centers.len()];
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let d = distance(&centers[i], &centers[j]);
            let e = 2.0 * r - d;
            if e <= 0.0 {
                continue;
            }
            let mut u: Point = if d > 0.0 {
                centers[i].iter().zip(&centers[j]).map(|(a, b)| (a - b) / d).collect()
            } else {
                vec![0.0; dim]
            };
            if d == 0.0 {
                u[(i + j) % dim] = 1.0;
            }
            // d(e²)/dc_i = -2e · u, with u the unit vector from c_j to c_i.
            for k in 0..dim {
                grad[i][k] -= 2.0 * e * u[k];
                grad[j][k] += 2.0 * e * u[k];
            }
        }
    }
    grad
}

fn initial_centers(instance: &PackingInstance, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let bound = instance.center_bound();
    let dim = instance.dim();
    (0..instance.count)
        .map(|_| match instance.container.kind {
            ContainerKind::Ball => sample_in_ball(bound, 1.0 / dim as f64, dim, rng),
            ContainerKind::Box => {
                use rand::Rng;
                (0..dim).map(|_| if bound > 0.0 { rng.random_range(-bound..=bound) } else { 0.0 }).collect()
            }
        })
        .collect()
}

/// Runs one restart from a seeded random feasible layout.
pub fn run_restart(instance: &PackingInstance, config: &BaselineConfig, index: usize) -> RestartResult {
    let r = instance.small_radius;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(index as u64);
    let mut centers = initial_centers(instance, &mut rng);
    let mut step = config.step_size * r;
    let mut trace = Vec::new();
    let mut best = (total_overlap_of(&centers, r, OverlapMeasure::Length), centers.clone());

    for it in 0..config.iters {
        if it > 0 {
            let grad = squared_hinge_grad(&centers, r);
            for (c, g) in centers.iter_mut().zip(&grad) {
                let moved: Point = c.iter().zip(g).map(|(x, gx)| x - step * gx).collect();
                *c = project_center(&moved, &instance.container, r);
            }
            if it % config.decay_every == 0 {
                step *= config.decay;
            }
        }
        let overlap = total_overlap_of(&centers, r, OverlapMeasure::Length);
        if it % config.snapshot_every == 0 || it + 1 == config.iters {
            trace.push(TraceRow { epoch: it, loss: squared_hinge(&centers, r), overlap_length: overlap, p: None });
        }
        if overlap < best.0 {
            best = (overlap, centers.clone());
        }
    }
    RestartResult { index, centers: best.1, overlap_length: best.0, trace }
}

/// Best of `config.restarts` independent restarts, ties broken by index.
pub fn baseline_pack(instance: &PackingInstance, config: &BaselineConfig) -> Result<RunRecord> {
    config.validate()?;
    let results: Vec<RestartResult> =
        (0..config.restarts).into_par_iter().map(|k| run_restart(instance, config, k)).collect();
    let best = results
        .into_iter()
        .min_by(|a, b| a.overlap_length.total_cmp(&b.overlap_length).then(a.index.cmp(&b.index)))
        .expect("at least one restart");
    let layout = Layout::new(*instance, best.centers.clone())?;
    let metrics = RunMetrics::compute(&layout, best.overlap_length, None);
    Ok(RunRecord::new(
        *instance,
        MethodConfig::Baseline(config.clone()),
        config.rng_seed,
        best.trace,
        best.centers.clone(),
        best.centers,
        best.index,
        metrics,
        None,
    ))
}

/// Per-restart best overlap lengths, in restart order.
pub fn restart_overlaps(instance: &PackingInstance, config: &BaselineConfig) -> Result<Vec<f64>> {
    config.validate()?;
    Ok((0..config.restarts).into_par_iter().map(|k| run_restart(instance, config, k).overlap_length).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Container;

    fn disk(n: usize, big: f64, r: f64) -> PackingInstance {
        PackingInstance::new(Container::ball(2, big).unwrap(), n, r).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let centers = vec![vec![0.0, 0.1], vec![0.3, -0.05], vec![0.2, 0.35], vec![0.9, 0.9]];
        let r = 0.25;
        let g = squared_hinge_grad(&centers, r);
        let h = 1e-6;
        for i in 0..centers.len() {
            for k in 0..2 {
                let mut p = centers.clone();
                p[i][k] += h;
                let mut m = centers.clone();
                m[i][k] -= h;
                let fd = (squared_hinge(&p, r) - squared_hinge(&m, r)) / (2.0 * h);
                assert!((fd - g[i][k]).abs() < 1e-6, "{i},{k}: {fd} vs {}", g[i][k]);
            }
        }
    }

    #[test]
    fn coincident_centers_separate() {
        let g = squared_hinge_grad(&[vec![0.0, 0.0], vec![0.0, 0.0]], 0.5);
        assert_ne!(g[0], vec![0.0, 0.0]);
        assert_eq!(g[0][0], -g[1][0]);
    }

    #[test]
    fn two_circles_separate() {
        let cfg = BaselineConfig { restarts: 2, iters: 3000, ..Default::default() };
        let rec = baseline_pack(&disk(2, 1.0, 0.45), &cfg).unwrap();
        // The squared hinge vanishes at tangency, so descent approaches
        // d = 2r from below and stops within rounding of it.
        assert!(rec.best_overlap_length() < 1e-12, "{}", rec.best_overlap_length());
    }

    #[test]
    fn single_iteration_returns_initial_layout() {
        let inst = disk(5, 1.0, 0.3);
        let cfg = BaselineConfig { restarts: 1, iters: 1, ..Default::default() };
        let rec = baseline_pack(&inst, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rng.set_stream(0);
        assert_eq!(rec.best_centers, initial_centers(&inst, &mut rng));
        assert!(rec.best_layout().is_ok());
    }

    #[test]
    fn infeasible_thirteen_always_overlaps() {
        let cfg = BaselineConfig { restarts: 4, iters: 5000, ..Default::default() };
        for o in restart_overlaps(&disk(13, 0.9, 0.2360679775), &cfg).unwrap() {
            assert!(o > 0.0);
        }
    }

    #[test]
    fn iterates_stay_feasible_in_a_box() {
        let inst = PackingInstance::new(Container::cube(3, 1.0).unwrap(), 9, 0.2).unwrap();
        let cfg = BaselineConfig { restarts: 1, iters: 500, ..Default::default() };
        let res = run_restart(&inst, &cfg, 0);
        assert!(Layout::new(inst, res.centers).is_ok());
    }

    #[test]
    fn rejects_bad_config() {
        let inst = disk(2, 1.0, 0.4);
        assert!(baseline_pack(&inst, &BaselineConfig { restarts: 0, ..Default::default() }).is_err());
        assert!(baseline_pack(&inst, &BaselineConfig { iters: 0, ..Default::default() }).is_err());
        assert!(baseline_pack(&inst, &BaselineConfig { decay: 1.5, ..Default::default() }).is_err());
    }
}
