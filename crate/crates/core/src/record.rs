//! `RunRecord`: the persisted result of one packer or baseline run, plus the
//! centers CSV format.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineConfig;
use crate::error::{Error, Result};
use crate::geometry::{Layout, OverlapMeasure, PackingInstance, Point};
use crate::metrics::DensityReport;
use crate::packer::{PerturbationSpec, TrainConfig};

pub const RUN_SCHEMA: &str = "circlepack.run/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EncoderDecoder,
    Baseline,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::EncoderDecoder => "encoder-decoder",
            Method::Baseline => "baseline (projected gradient)",
        }
    }
}

/// Resolved configuration echoed into the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum MethodConfig {
    EncoderDecoder { perturbation: PerturbationSpec, train: TrainConfig },
    Baseline(BaselineConfig),
}

impl MethodConfig {
    pub fn method(&self) -> Method {
        match self {
            MethodConfig::EncoderDecoder { .. } => Method::EncoderDecoder,
            MethodConfig::Baseline(_) => Method::Baseline,
        }
    }

    /// Epochs for the packer, iterations per restart for the baseline.
    pub fn iterations(&self) -> usize {
        match self {
            MethodConfig::EncoderDecoder { train, .. } => train.epochs,
            MethodConfig::Baseline(b) => b.iters,
        }
    }
}

/// One trace sample. `epoch` counts iterations for the baseline, where `p`
/// is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub loss: f64,
    pub overlap_length: f64,
    pub p: Option<f64>,
}

/// Closed-form metrics of the reported (best) layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub final_overlap_length: f64,
    pub best_overlap_length: f64,
    /// Lens area (2D) or volume (3D), summed over pairs.
    pub best_overlap_measure: f64,
    /// `(N·V_small − O_pairwise) / V_container`.
    pub formula_density: f64,
    pub overlapping_pairs: usize,
    pub pairwise_overlap_mean: f64,
    pub pairwise_overlap_std: f64,
    /// Some three balls pairwise overlap, so the pairwise formula may
    /// undercount the union.
    pub mutual_triple_overlap: bool,
    /// Decoder misclassification rate (packer only).
    pub indicator_error: Option<f64>,
    /// Monte Carlo density of the best layout, when computed.
    pub density: Option<DensityReport>,
}

impl RunMetrics {
    pub fn compute(best: &Layout, final_overlap_length: f64, indicator_error: Option<f64>) -> Self {
        let inst = &best.instance;
        let pairs = best.pairwise_overlaps();
        let measure = best.total_overlap(OverlapMeasure::AreaOrVolume);
        let count = pairs.len();
        let mean = if count > 0 { pairs.iter().sum::<f64>() / count as f64 } else { 0.0 };
        let var = if count > 0 { pairs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / count as f64 } else { 0.0 };
        Self {
            final_overlap_length,
            best_overlap_length: best.total_overlap(OverlapMeasure::Length),
            best_overlap_measure: measure,
            formula_density: (inst.count as f64 * inst.small_ball_volume() - measure) / inst.container.volume(),
            overlapping_pairs: count,
            pairwise_overlap_mean: mean,
            pairwise_overlap_std: var.sqrt(),
            mutual_triple_overlap: best.has_mutual_triple(),
            indicator_error,
            density: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortInfo {
    pub epoch: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub method: Method,
    pub instance: PackingInstance,
    pub config: MethodConfig,
    pub seed: u64,
    pub trace: Vec<TraceRow>,
    pub final_centers: Vec<Point>,
    pub best_centers: Vec<Point>,
    pub best_epoch: usize,
    pub metrics: RunMetrics,
    pub abort: Option<AbortInfo>,
}

impl RunRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance: PackingInstance,
        config: MethodConfig,
        seed: u64,
        trace: Vec<TraceRow>,
        final_centers: Vec<Point>,
        best_centers: Vec<Point>,
        best_epoch: usize,
        metrics: RunMetrics,
        abort: Option<(usize, String)>,
    ) -> Self {
        Self {
            schema: RUN_SCHEMA.to_string(),
            method: config.method(),
            instance,
            config,
            seed,
            trace,
            final_centers,
            best_centers,
            best_epoch,
            metrics,
            abort: abort.map(|(epoch, reason)| AbortInfo { epoch, reason }),
        }
    }

    pub fn best_layout(&self) -> Result<Layout> {
        Layout::new(self.instance, self.best_centers.clone())
    }

    pub fn final_layout(&self) -> Result<Layout> {
        Layout::new(self.instance, self.final_centers.clone())
    }

    pub fn best_overlap_length(&self) -> f64 {
        self.metrics.best_overlap_length
    }

    pub fn is_aborted(&self) -> bool {
        self.abort.is_some()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: RunRecord = serde_json::from_str(text)?;
        if record.schema != RUN_SCHEMA {
            return Err(Error::Parse(format!("unsupported run schema `{}`", record.schema)));
        }
        Ok(record)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Centers as CSV: header `index,x,y[,z]`, 17 significant digits.
pub fn centers_to_csv(centers: &[Point]) -> String {
    let dim = centers.first().map_or(2, Vec::len);
    let mut out = String::from("index,x,y");
    if dim == 3 {
        out.push_str(",z");
    }
    out.push('\n');
    for (i, c) in centers.iter().enumerate() {
        write!(out, "{i}").unwrap();
        for x in c {
            write!(out, ",{x:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses [`centers_to_csv`] output. Rows must be indexed `0..N` in order.
pub fn centers_from_csv(text: &str) -> Result<Vec<Point>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty centers CSV".into()))?;
    let dim = match header.trim() {
        "index,x,y" => 2,
        "index,x,y,z" => 3,
        other => return Err(Error::Parse(format!("unexpected centers CSV header `{other}`"))),
    };
    let mut centers = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!("row {row}: expected {} fields, got {}", dim + 1, fields.len())));
        }
        let index: usize = fields[0].parse().map_err(|_| Error::Parse(format!("row {row}: bad index")))?;
        if index != row {
            return Err(Error::Parse(format!("row {row}: index {index} out of order")));
        }
        let c = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("row {row}: bad coordinate `{f}`"))))
            .collect::<Result<Point>>()?;
        centers.push(c);
    }
    Ok(centers)
}
