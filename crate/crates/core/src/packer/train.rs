use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{EncoderDecoderModel, Widths};
use super::perturbation::{sample_perturbation, PerturbationSpec};
use crate::error::{Error, Result};
use crate::geometry::{total_overlap_of, Layout, OverlapMeasure, PackingInstance, Point};
use crate::nn::{AdamState, Matrix};
use crate::record::{MethodConfig, RunMetrics, RunRecord, TraceRow};

pub const CHECKPOINT_SCHEMA: &str = "circlepack.checkpoint/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub rng_seed: u64,
    pub snapshot_every: usize,
    #[serde(default)]
    pub widths: Widths,
    /// Independent perturbation draws per circle per epoch; the loss is
    /// averaged over them.
    pub draws_per_circle: usize,
    /// Fresh draws per circle for the final misclassification estimate.
    pub indicator_draws: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20_000,
            learning_rate: 5e-4,
            rng_seed: 0,
            snapshot_every: 100,
            widths: Widths::default(),
            draws_per_circle: 1,
            indicator_draws: 1000,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if self.snapshot_every == 0 || self.draws_per_circle == 0 {
            return Err(Error::InvalidArgument("snapshot_every and draws_per_circle must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        Ok(())
    }
}

/// Default schedule: `p = 2` then `p = 1/5` from the midpoint.
pub fn default_schedule(instance: &PackingInstance, epochs: usize) -> PerturbationSpec {
    PerturbationSpec::two_phase(instance.small_radius, epochs).expect("positive radius")
}

/// Result of one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub loss: f64,
    pub overlap_length: f64,
    pub p: f64,
    /// Largest container norm (‖·‖₂ for a ball, ‖·‖∞ for a box) among the
    /// perturbed decoder inputs; at most the container extent.
    pub input_extent: f64,
}

/// Serializable training state, sufficient to resume bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: String,
    pub perturbation: PerturbationSpec,
    pub config: TrainConfig,
    pub epoch: usize,
    pub model: EncoderDecoderModel,
    pub adam: AdamState,
    /// ChaCha8 word position, as a decimal string (u128).
    pub rng_word_pos: String,
    pub trace: Vec<TraceRow>,
    pub best_centers: Vec<Point>,
    pub best_overlap: Option<f64>,
    pub best_epoch: usize,
}

/// Owns one training run.
pub struct Trainer {
    pub model: EncoderDecoderModel,
    pub adam: AdamState,
    pub pspec: PerturbationSpec,
    pub config: TrainConfig,
    rng: ChaCha8Rng,
    epoch: usize,
    trace: Vec<TraceRow>,
    best_centers: Vec<Point>,
    best_overlap: f64,
    best_epoch: usize,
}

impl Trainer {
    pub fn new(instance: PackingInstance, pspec: PerturbationSpec, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let mut model = EncoderDecoderModel::new(instance, config.widths, &mut rng)?;
        let adam = AdamState::for_params(config.learning_rate, &model.params_mut());
        Ok(Self {
            model,
            adam,
            pspec,
            config,
            rng,
            epoch: 0,
            trace: Vec::new(),
            best_centers: Vec::new(),
            best_overlap: f64::INFINITY,
            best_epoch: 0,
        })
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn instance(&self) -> &PackingInstance {
        &self.model.instance
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    fn draw_perturbations(&mut self, p: f64) -> Matrix {
        let n = self.model.count();
        let dim = self.model.dim();
        let rows = n * self.config.draws_per_circle;
        let mut w = Matrix::zeros(rows, dim);
        for row in 0..rows {
            let v = sample_perturbation(self.pspec.radius, p, dim, &mut self.rng);
            w.row_mut(row).copy_from_slice(&v);
        }
        w
    }

    fn note_layout(&mut self, centers: Vec<Point>, overlap: f64, epoch: usize) {
        if overlap < self.best_overlap {
            self.best_overlap = overlap;
            self.best_centers = centers;
            self.best_epoch = epoch;
        }
    }

    /// One identity-batch step. Returns the pre-update loss and the overlap
    /// length of the pre-update layout.
    pub fn train_epoch(&mut self) -> Result<EpochStats> {
        let p = self.pspec.scheduled_p(self.epoch);
        let w = self.draw_perturbations(p);
        let (eval, grads) = self.model.loss_and_grads(&w)?;
        if !eval.loss.is_finite() {
            return Err(Error::NonFinite(format!("loss {} at epoch {}", eval.loss, self.epoch)));
        }
        let centers = eval.centers.to_rows();
        let overlap = total_overlap_of(&centers, self.model.instance.small_radius, OverlapMeasure::Length);
        let container = &self.model.instance.container;
        let input_extent =
            (0..eval.perturbed.rows()).map(|i| container.constraint_norm(eval.perturbed.row(i))).fold(0.0, f64::max);
        let stats = EpochStats { loss: eval.loss, overlap_length: overlap, p, input_extent };
        if self.epoch.is_multiple_of(self.config.snapshot_every) {
            self.trace.push(TraceRow { epoch: self.epoch, loss: eval.loss, overlap_length: overlap, p: Some(p) });
        }
        self.note_layout(centers, overlap, self.epoch);

        let flat = grads.flat();
        let mut params = self.model.params_mut();
        self.adam.step(&mut params, &flat)?;
        self.model.project_alpha();
        self.epoch += 1;
        Ok(stats)
    }

    /// Evaluates the current layout without updating, with fresh
    /// perturbations at the scheduled `p`.
    fn closing_row(&mut self) -> Result<TraceRow> {
        let p = self.pspec.scheduled_p(self.epoch);
        let w = self.draw_perturbations(p);
        let loss = self.model.loss(&w)?;
        let centers = self.model.encode_centers()?;
        let overlap = total_overlap_of(&centers, self.model.instance.small_radius, OverlapMeasure::Length);
        self.note_layout(centers, overlap, self.epoch);
        Ok(TraceRow { epoch: self.epoch, loss, overlap_length: overlap, p: Some(p) })
    }

    /// Fraction of (circle, draw) pairs whose decoded argmax is not the
    /// circle's own index, over `draws` fresh perturbations per circle.
    pub fn indicator_error(&self, p: f64, draws: usize, seed: u64) -> Result<f64> {
        indicator_error(&self.model, self.pspec.radius, p, draws, seed)
    }

    fn record(&self, final_centers: Vec<Point>, abort: Option<(usize, String)>) -> Result<RunRecord> {
        let instance = self.model.instance;
        let final_overlap = total_overlap_of(&final_centers, instance.small_radius, OverlapMeasure::Length);
        let best = if self.best_centers.is_empty() { final_centers.clone() } else { self.best_centers.clone() };
        let best_layout = Layout::new(instance, best.clone())?;
        let indicator = if abort.is_none() && self.config.indicator_draws > 0 {
            let p = self.pspec.scheduled_p(self.epoch.saturating_sub(1));
            Some(self.indicator_error(p, self.config.indicator_draws, self.config.rng_seed ^ 0x5eed)?)
        } else {
            None
        };
        Ok(RunRecord::new(
            instance,
            MethodConfig::EncoderDecoder { perturbation: self.pspec.clone(), train: self.config.clone() },
            self.config.rng_seed,
            self.trace.clone(),
            final_centers,
            best,
            self.best_epoch,
            RunMetrics::compute(&best_layout, final_overlap, indicator),
            abort,
        ))
    }

    /// Runs the remaining epochs and produces the record.
    pub fn run(mut self) -> Result<RunRecord> {
        while self.epoch < self.config.epochs {
            if let Err(e) = self.train_epoch() {
                let epoch = self.epoch;
                let reason = e.to_string();
                let centers = self.model.encode_centers().unwrap_or_else(|_| self.best_centers.clone());
                let centers = if Layout::new(self.model.instance, centers.clone()).is_ok() {
                    centers
                } else {
                    self.best_centers.clone()
                };
                let record = self.record(centers, Some((epoch, reason.clone())))?;
                return Err(Error::Aborted { epoch, reason, record: Box::new(record) });
            }
        }
        let row = self.closing_row()?;
        self.trace.push(row);
        let final_centers = self.model.encode_centers()?;
        self.record(final_centers, None)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            schema: CHECKPOINT_SCHEMA.to_string(),
            perturbation: self.pspec.clone(),
            config: self.config.clone(),
            epoch: self.epoch,
            model: self.model.clone(),
            adam: self.adam.clone(),
            rng_word_pos: self.rng.get_word_pos().to_string(),
            trace: self.trace.clone(),
            best_centers: self.best_centers.clone(),
            best_overlap: self.best_overlap.is_finite().then_some(self.best_overlap),
            best_epoch: self.best_epoch,
        }
    }

    pub fn from_checkpoint(cp: Checkpoint) -> Result<Self> {
        if cp.schema != CHECKPOINT_SCHEMA {
            return Err(Error::Parse(format!("unsupported checkpoint schema `{}`", cp.schema)));
        }
        let pos: u128 = cp.rng_word_pos.parse().map_err(|_| Error::Parse("bad rng position".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cp.config.rng_seed);
        rng.set_word_pos(pos);
        Ok(Self {
            model: cp.model,
            adam: cp.adam,
            pspec: cp.perturbation,
            config: cp.config,
            rng,
            epoch: cp.epoch,
            trace: cp.trace,
            best_centers: cp.best_centers,
            best_overlap: cp.best_overlap.unwrap_or(f64::INFINITY),
            best_epoch: cp.best_epoch,
        })
    }
}

impl Checkpoint {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Misclassification rate of the decoder under fresh perturbations.
pub fn indicator_error(model: &EncoderDecoderModel, radius: f64, p: f64, draws: usize, seed: u64) -> Result<f64> {
    let n = model.count();
    let dim = model.dim();
    let centers = model.encode_centers()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut input = Matrix::zeros(n * draws, dim);
    for row in 0..n * draws {
        let w = sample_perturbation(radius, p, dim, &mut rng);
        for ((x, c), wk) in input.row_mut(row).iter_mut().zip(&centers[row % n]).zip(&w) {
            *x = c + wk;
        }
    }
    let decoded = model.decode_argmax(&input)?;
    let wrong = decoded.iter().enumerate().filter(|(row, &k)| k != row % n).count();
    Ok(wrong as f64 / (n * draws) as f64)
}

/// Trains the encoder-decoder model on `instance` and returns the record.
pub fn train(instance: PackingInstance, pspec: PerturbationSpec, config: TrainConfig) -> Result<RunRecord> {
    Trainer::new(instance, pspec, config)?.run()
}

/// Standalone draw helper for callers that want to freeze perturbations.
pub fn draw_perturbation_batch<R: Rng + ?Sized>(rows: usize, radius: f64, p: f64, dim: usize, rng: &mut R) -> Matrix {
    let mut w = Matrix::zeros(rows, dim);
    for row in 0..rows {
        w.row_mut(row).copy_from_slice(&sample_perturbation(radius, p, dim, rng));
    }
    w
}
