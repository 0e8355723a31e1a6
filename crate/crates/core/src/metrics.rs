//! Reported quantities: packing density, best-known reference ratios,
//! side-by-side comparisons and trace tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, mc_density_of, total_overlap_of, Container, ContainerKind, Layout, OverlapMeasure, PackingInstance,
    Point,
};
use crate::record::RunRecord;

/// Default Monte Carlo sample count.
pub const DEFAULT_MC_SAMPLES: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// Monte Carlo union fraction.
    pub density: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub overlap_length: f64,
    /// Pairwise lens area (2D) or volume (3D).
    pub overlap_measure: f64,
    /// `(N·V_small − O) / V_container`.
    pub formula_density: f64,
    pub triple_overlap_detected: bool,
}

pub fn density_report(layout: &Layout, samples: u64, seed: u64) -> Result<DensityReport> {
    density_report_of(&layout.instance.container, layout.instance.small_radius, &layout.centers, samples, seed)
}

/// [`density_report`] on bare centers; an empty center list has density 0.
pub fn density_report_of(
    container: &Container,
    r: f64,
    centers: &[Point],
    samples: u64,
    seed: u64,
) -> Result<DensityReport> {
    let mc = mc_density_of(container, r, centers, samples, seed)?;
    let measure = total_overlap_of(centers, r, OverlapMeasure::AreaOrVolume);
    let formula = (centers.len() as f64 * ball_volume(container.dim, r) - measure) / container.volume();
    Ok(DensityReport {
        density: mc.estimate,
        std_error: mc.std_error,
        samples,
        seed,
        overlap_length: total_overlap_of(centers, r, OverlapMeasure::Length),
        overlap_measure: measure,
        formula_density: formula,
        triple_overlap_detected: mc.triple_overlap_detected(),
    })
}

/// Attaches a Monte Carlo density report for the best layout.
pub fn attach_density(record: &mut RunRecord, samples: u64, seed: u64) -> Result<()> {
    let layout = record.best_layout()?;
    let report = density_report(&layout, samples, seed)?;
    if report.triple_overlap_detected {
        record.metrics.mutual_triple_overlap = true;
    }
    record.metrics.density = Some(report);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Value reported with the original experiments.
    Published,
    /// Elementary geometry, checked by the baseline oracle.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub kind: ContainerKind,
    pub dim: usize,
    pub count: usize,
    /// Best-known `r*/R` (ball) or `r*/(s/2)` (box).
    pub ratio: f64,
    pub provenance: Provenance,
}

impl ReferenceEntry {
    /// Best-known radius for a concrete container.
    pub fn radius_for(&self, container: &Container) -> f64 {
        self.ratio * container.admissible_radius()
    }

    /// Density of the best-known packing in `container`.
    pub fn density_for(&self, container: &Container) -> f64 {
        self.count as f64 * ball_volume(self.dim, self.radius_for(container)) / container.volume()
    }
}

/// Best-known small-to-large radius ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub entries: Vec<ReferenceEntry>,
}

impl Default for ReferenceTable {
    fn default() -> Self {
        use ContainerKind::{Ball, Box};
        use Provenance::{Derived, Published};
        let e = |kind, dim, count, ratio, provenance| ReferenceEntry { kind, dim, count, ratio, provenance };
        Self {
            entries: vec![
                e(Ball, 2, 2, 0.5, Derived),
                e(Ball, 2, 3, 2.0 * 3f64.sqrt() - 3.0, Derived),
                e(Ball, 2, 4, 2f64.sqrt() - 1.0, Derived),
                e(Ball, 2, 7, 0.33333, Published),
                e(Ball, 2, 13, 0.2360679775, Published),
                e(Ball, 2, 14, 0.2310307, Published),
                e(Ball, 3, 15, 0.318304823, Published),
                e(Box, 3, 15, 0.192307692 * 2.0, Published),
            ],
        }
    }
}

impl ReferenceTable {
    pub fn get(&self, kind: ContainerKind, dim: usize, count: usize) -> Option<&ReferenceEntry> {
        self.entries.iter().find(|e| e.kind == kind && e.dim == dim && e.count == count)
    }

    pub fn for_instance(&self, instance: &PackingInstance) -> Option<&ReferenceEntry> {
        self.get(instance.container.kind, instance.dim(), instance.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub seed: u64,
    pub overlap_length: f64,
    pub overlap_measure: f64,
    pub density: f64,
    pub std_error: f64,
    pub formula_density: f64,
    pub iterations: usize,
    pub pairwise_overlap_std: f64,
    /// Filled in by callers that time runs; never part of a record.
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub instance: PackingInstance,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub reference_ratio: Option<f64>,
    pub reference_density: Option<f64>,
    pub rows: Vec<ComparisonRow>,
}

/// Evaluates every record's best layout with the same Monte Carlo seed and
/// sample count. Rows are sorted by overlap length.
pub fn compare(instance: &PackingInstance, records: &[RunRecord], samples: u64, seed: u64) -> Result<ComparisonReport> {
    compare_with(instance, records, samples, seed, &ReferenceTable::default())
}

pub fn compare_with(
    instance: &PackingInstance,
    records: &[RunRecord],
    samples: u64,
    seed: u64,
    table: &ReferenceTable,
) -> Result<ComparisonReport> {
    let labeled: Vec<(&str, &RunRecord)> = records.iter().map(|r| (r.method.label(), r)).collect();
    compare_labeled(instance, &labeled, samples, seed, table)
}

/// [`compare_with`] with caller-chosen row labels, e.g. one per schedule.
pub fn compare_labeled(
    instance: &PackingInstance,
    records: &[(&str, &RunRecord)],
    samples: u64,
    seed: u64,
    table: &ReferenceTable,
) -> Result<ComparisonReport> {
    let mut rows = Vec::with_capacity(records.len());
    for &(label, rec) in records {
        if rec.instance != *instance {
            return Err(Error::InvalidArgument(format!(
                "record for {:?} does not match instance {:?}",
                rec.instance, instance
            )));
        }
        let d = density_report(&rec.best_layout()?, samples, seed)?;
        rows.push(ComparisonRow {
            method: label.to_string(),
            seed: rec.seed,
            overlap_length: d.overlap_length,
            overlap_measure: d.overlap_measure,
            density: d.density,
            std_error: d.std_error,
            formula_density: d.formula_density,
            iterations: rec.config.iterations(),
            pairwise_overlap_std: rec.metrics.pairwise_overlap_std,
            wall_time_s: None,
        });
    }
    rows.sort_by(|a, b| {
        a.overlap_length.total_cmp(&b.overlap_length).then_with(|| a.method.cmp(&b.method)).then(a.seed.cmp(&b.seed))
    });
    let reference = table.for_instance(instance);
    Ok(ComparisonReport {
        instance: *instance,
        mc_samples: samples,
        mc_seed: seed,
        reference_ratio: reference.map(|e| e.ratio),
        reference_density: reference.map(|e| e.density_for(&instance.container)),
        rows,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let inst = &self.instance;
        let mut out = String::new();
        writeln!(
            out,
            "instance: {} extent={} N={} r={}",
            inst.container.label(),
            inst.container.extent,
            inst.count,
            inst.small_radius
        )
        .unwrap();
        writeln!(out, "monte carlo: M={} seed={}", self.mc_samples, self.mc_seed).unwrap();
        if let (Some(ratio), Some(density)) = (self.reference_ratio, self.reference_density) {
            writeln!(out, "best known: ratio={ratio} density={density:.6}").unwrap();
        }
        writeln!(
            out,
            "{:<30} {:>6} {:>14} {:>14} {:>10} {:>10} {:>10} {:>8}",
            "method", "seed", "overlap_len", "overlap_meas", "density", "std_err", "formula", "iters"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<30} {:>6} {:>14.6e} {:>14.6e} {:>10.6} {:>10.2e} {:>10.6} {:>8}",
                r.method,
                r.seed,
                r.overlap_length,
                r.overlap_measure,
                r.density,
                r.std_error,
                r.formula_density,
                r.iterations
            )
            .unwrap();
        }
        out
    }
}

/// Trace as CSV with header `epoch,loss,overlap_length,p`. The `p` column is
/// empty for baseline records.
pub fn trace_export(record: &RunRecord) -> String {
    let mut out = String::from("epoch,loss,overlap_length,p\n");
    for row in &record.trace {
        let p = row.p.map(|p| p.to_string()).unwrap_or_default();
        writeln!(out, "{},{:e},{:e},{}", row.epoch, row.loss, row.overlap_length, p).unwrap();
    }
    out
}

/// Minimum, median and maximum of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Some(Self { min: v[0], median, max: v[n - 1] })
    }
}
