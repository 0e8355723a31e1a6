//! The `circlepack` command line.
//!
//! Subcommands `pack`, `baseline`, `bench`, `density` and `render`. Every
//! numeric option can also come from a JSON file given with `--config`;
//! flags override that file, which overrides the built-in defaults. The
//! resolved configuration is echoed into each run record.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 a training
//! run aborted (its diagnostic record is still written).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_pack, BaselineConfig};
use crate::error::{Error, Result};
use crate::geometry::{Container, ContainerKind, Layout, PackingInstance, Point};
use crate::metrics::{
    attach_density, compare_labeled, compare_with, density_report, trace_export, ComparisonReport, DensityReport,
    ReferenceTable, Spread, DEFAULT_MC_SAMPLES,
};
use crate::packer::{train, PerturbationSpec, TrainConfig};
use crate::record::{centers_from_csv, centers_to_csv, RunRecord};
use crate::render::{render_svg, RenderStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "circlepack", version, about = "Pack identical circles and spheres in a container")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the encoder-decoder packer.
    Pack(PackArgs),
    /// Run the projected-gradient baseline.
    Baseline(BaselineArgs),
    /// Run a p-schedule study or a density sweep.
    Bench(BenchArgs),
    /// Monte Carlo density of a saved layout.
    Density(DensityArgs),
    /// Draw a saved layout as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainerArg {
    Ball,
    Box,
}

/// Instance options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct InstanceArgs {
    #[arg(long, value_enum)]
    pub container: Option<ContainerArg>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Container radius (ball).
    #[arg(long = "R")]
    pub big_radius: Option<f64>,
    /// Container side length (box).
    #[arg(long = "s")]
    pub side: Option<f64>,
    /// Number of objects.
    #[arg(long = "N")]
    pub count: Option<usize>,
    /// Radius of every small object.
    #[arg(long = "r")]
    pub radius: Option<f64>,
    /// JSON file with defaults for any option.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, env = "PACK_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Monte Carlo samples for the density report (0 skips it).
    #[arg(long)]
    pub mc_samples: Option<u64>,
    #[arg(long)]
    pub mc_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Piecewise-constant p schedule, e.g. `0:2,10000:0.2`.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Perturbation draws per object per epoch.
    #[arg(long)]
    pub draws: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SeedArgs {
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Comma-separated list of seeds, run concurrently.
    #[arg(long)]
    pub seeds: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RestartArgs {
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    /// Initial step as a multiple of the small radius.
    #[arg(long)]
    pub step_size: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub restarts: RestartArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    /// Fixed p ∈ {2, 1/2, 1/5, 1/10} against the scheduled p on one instance.
    PStudy,
    /// Both methods over a list of object counts at one radius.
    Sweep,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "p-study")]
    pub mode: BenchMode,
    /// Object counts for the sweep, e.g. `2,3,4` or `2..16`.
    #[arg(long)]
    pub counts: Option<String>,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub restarts: RestartArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Centers CSV; needs the instance options.
    #[arg(long, conflicts_with = "run")]
    pub from_csv: Option<PathBuf>,
    /// Run record JSON.
    #[arg(long)]
    pub run: Option<PathBuf>,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub mc_samples: Option<u64>,
    #[arg(long)]
    pub mc_seed: Option<u64>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, conflicts_with = "run")]
    pub from_csv: Option<PathBuf>,
    #[arg(long)]
    pub run: Option<PathBuf>,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Which centers of a run record to draw.
    #[arg(long, default_value_t = false)]
    pub final_layout: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Contents of a `--config` file. Field names follow the long flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub container: Option<ContainerArg>,
    pub dim: Option<usize>,
    #[serde(rename = "R")]
    pub big_radius: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "N")]
    pub count: Option<usize>,
    pub r: Option<f64>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub epochs: Option<usize>,
    pub schedule: Option<String>,
    pub learning_rate: Option<f64>,
    pub snapshot_every: Option<usize>,
    pub draws: Option<usize>,
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub step_size: Option<f64>,
    pub mc_samples: Option<u64>,
    pub mc_seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
                .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", p.display()))),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Aborted { .. } => EXIT_ABORTED,
        _ => EXIT_USAGE,
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Pack(a) => cmd_pack(&a),
        Command::Baseline(a) => cmd_baseline(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Density(a) => cmd_density(&a),
        Command::Render(a) => cmd_render(&a),
    }
}

fn resolve_instance(a: &InstanceArgs, file: &FileConfig, count: Option<usize>) -> Result<PackingInstance> {
    let kind = match a.container.or(file.container).unwrap_or(ContainerArg::Ball) {
        ContainerArg::Ball => ContainerKind::Ball,
        ContainerArg::Box => ContainerKind::Box,
    };
    let dim = a.dim.or(file.dim).unwrap_or(2);
    let (extent, other) = match kind {
        ContainerKind::Ball => (a.big_radius.or(file.big_radius), a.side.or(file.s)),
        ContainerKind::Box => (a.side.or(file.s), a.big_radius.or(file.big_radius)),
    };
    if other.is_some() {
        let (want, got) = if kind == ContainerKind::Ball { ("--R", "--s") } else { ("--s", "--R") };
        return Err(Error::InvalidArgument(format!("{got} does not apply to a {kind:?} container; use {want}")));
    }
    let container = Container::new(kind, dim, extent.unwrap_or(1.0))?;
    let count = count.or(a.count).or(file.count).ok_or_else(|| Error::InvalidArgument("--N is required".into()))?;
    let r = a.radius.or(file.r).ok_or_else(|| Error::InvalidArgument("--r is required".into()))?;
    PackingInstance::new(container, count, r)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::InvalidArgument(format!("bad {what} `{s}`"))))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::InvalidArgument(format!("empty {what} list")));
    }
    Ok(items)
}

/// `2,3,5` or an inclusive range `2..16`.
fn parse_counts(text: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let bad = || Error::InvalidArgument(format!("bad count range `{text}`"));
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(text, "count")
}

fn resolve_seeds(a: &SeedArgs, file: &FileConfig) -> Result<Vec<u64>> {
    if let Some(s) = a.seed {
        return Ok(vec![s]);
    }
    if let Some(list) = &a.seeds {
        return parse_list(list, "seed");
    }
    if let Some(s) = file.seed {
        return Ok(vec![s]);
    }
    match &file.seeds {
        Some(v) if v.is_empty() => Err(Error::InvalidArgument("empty seed list".into())),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![0]),
    }
}

fn resolve_train(
    a: &TrainArgs,
    file: &FileConfig,
    instance: &PackingInstance,
) -> Result<(PerturbationSpec, TrainConfig)> {
    let d = TrainConfig::default();
    let config = TrainConfig {
        epochs: a.epochs.or(file.epochs).unwrap_or(d.epochs),
        learning_rate: a.learning_rate.or(file.learning_rate).unwrap_or(d.learning_rate),
        snapshot_every: a.snapshot_every.or(file.snapshot_every).unwrap_or(d.snapshot_every),
        draws_per_circle: a.draws.or(file.draws).unwrap_or(d.draws_per_circle),
        ..d
    };
    config.validate()?;
    let pspec = match a.schedule.as_deref().or(file.schedule.as_deref()) {
        Some(text) => PerturbationSpec::new(instance.small_radius, PerturbationSpec::parse_schedule(text)?)?,
        None => PerturbationSpec::two_phase(instance.small_radius, config.epochs)?,
    };
    Ok((pspec, config))
}

fn resolve_baseline(a: &RestartArgs, file: &FileConfig) -> Result<BaselineConfig> {
    let d = BaselineConfig::default();
    let config = BaselineConfig {
        restarts: a.restarts.or(file.restarts).unwrap_or(d.restarts),
        iters: a.iters.or(file.iters).unwrap_or(d.iters),
        step_size: a.step_size.or(file.step_size).unwrap_or(d.step_size),
        ..d
    };
    config.validate()?;
    Ok(config)
}

fn resolve_mc(samples: Option<u64>, seed: Option<u64>, file: &FileConfig) -> (u64, u64) {
    (samples.or(file.mc_samples).unwrap_or(DEFAULT_MC_SAMPLES), seed.or(file.mc_seed).unwrap_or(0))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn svg_title(record: &RunRecord) -> String {
    let inst = &record.instance;
    format!(
        "{} {} N={} r={} seed={} overlap={:.6e}",
        record.method.label(),
        inst.container.label(),
        inst.count,
        inst.small_radius,
        record.seed,
        record.best_overlap_length()
    )
}

/// Writes `<stem>.json`, `<stem>_centers.csv`, `<stem>_trace.csv` and
/// `<stem>.svg` for the best layout of `record`.
pub fn write_run_artifacts(dir: &Path, stem: &str, record: &RunRecord) -> Result<()> {
    write(&dir.join(format!("{stem}.json")), &record.to_json()?)?;
    write(&dir.join(format!("{stem}_centers.csv")), &centers_to_csv(&record.best_centers))?;
    write(&dir.join(format!("{stem}_trace.csv")), &trace_export(record))?;
    let style = RenderStyle { title: Some(svg_title(record)), ..Default::default() };
    write(&dir.join(format!("{stem}.svg")), &render_svg(&record.best_layout()?, &style)?)?;
    Ok(())
}

fn summary_line(stem: &str, record: &RunRecord, seconds: f64) -> String {
    let m = &record.metrics;
    let density =
        m.density.as_ref().map(|d| format!(" density={:.6}±{:.1e}", d.density, d.std_error)).unwrap_or_default();
    format!(
        "{stem}: best_overlap={:.6e} final_overlap={:.6e} formula_density={:.6}{density} best_epoch={} ({seconds:.2}s)",
        m.best_overlap_length, m.final_overlap_length, m.formula_density, record.best_epoch
    )
}

/// Runs `job` for every seed in parallel, writes each record and returns
/// the process exit code.
fn run_seeds<F>(seeds: &[u64], out: &OutputArgs, file: &FileConfig, prefix: &str, job: F) -> Result<i32>
where
    F: Fn(u64) -> Result<RunRecord> + Sync,
{
    let (samples, mc_seed) = resolve_mc(out.mc_samples, out.mc_seed, file);
    let results: Vec<(u64, Result<RunRecord>, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let start = std::time::Instant::now();
            let result = job(seed).and_then(|mut rec| {
                if samples > 0 {
                    attach_density(&mut rec, samples, mc_seed)?;
                }
                Ok(rec)
            });
            (seed, result, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut code = EXIT_OK;
    for (seed, result, seconds) in results {
        let stem = format!("{prefix}_seed{seed}");
        match result {
            Ok(rec) => {
                write_run_artifacts(&out.out_dir, &stem, &rec)?;
                println!("{}", summary_line(&stem, &rec, seconds));
            }
            Err(Error::Aborted { epoch, reason, record }) => {
                write(&out.out_dir.join(format!("{stem}.json")), &record.to_json()?)?;
                eprintln!("{stem}: aborted at epoch {epoch}: {reason}");
                code = EXIT_ABORTED;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(code)
}

pub fn cmd_pack(a: &PackArgs) -> Result<i32> {
    let file = FileConfig::load(a.instance.config.as_deref())?;
    let instance = resolve_instance(&a.instance, &file, None)?;
    let seeds = resolve_seeds(&a.seeds, &file)?;
    let (pspec, config) = resolve_train(&a.train, &file, &instance)?;
    run_seeds(&seeds, &a.output, &file, "pack", |seed| train(instance, pspec.clone(), config.clone().with_seed(seed)))
}

pub fn cmd_baseline(a: &BaselineArgs) -> Result<i32> {
    let file = FileConfig::load(a.instance.config.as_deref())?;
    let instance = resolve_instance(&a.instance, &file, None)?;
    let seeds = resolve_seeds(&a.seeds, &file)?;
    let config = resolve_baseline(&a.restarts, &file)?;
    run_seeds(&seeds, &a.output, &file, "baseline", |seed| baseline_pack(&instance, &config.clone().with_seed(seed)))
}

/// One fixed or scheduled variant of the p-study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub label: String,
    pub schedule: Vec<(usize, f64)>,
    pub seeds: Vec<u64>,
    pub final_overlaps: Vec<f64>,
    pub best_overlaps: Vec<f64>,
    pub final_spread: Option<Spread>,
    pub best_spread: Option<Spread>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PStudySummary {
    pub instance: PackingInstance,
    pub epochs: usize,
    pub variants: Vec<VariantSummary>,
    /// Median final overlap of the schedule is at most that of fixed p = 1/10.
    pub schedule_beats_fixed_tenth: Option<bool>,
    pub comparison: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub reports: Vec<ComparisonReport>,
    pub failures: Vec<String>,
}

/// Fixed exponents of the p-study.
pub const P_STUDY_FIXED: [(&str, f64); 4] = [("p2", 2.0), ("p1_2", 0.5), ("p1_5", 0.2), ("p1_10", 0.1)];

pub fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let file = FileConfig::load(a.instance.config.as_deref())?;
    let seeds = resolve_seeds(&a.seeds, &file)?;
    match a.mode {
        BenchMode::PStudy => bench_p_study(a, &file, &seeds),
        BenchMode::Sweep => bench_sweep(a, &file, &seeds),
    }
}

fn bench_p_study(a: &BenchArgs, file: &FileConfig, seeds: &[u64]) -> Result<i32> {
    let instance = resolve_instance(&a.instance, file, None)?;
    let (scheduled, config) = resolve_train(&a.train, file, &instance)?;
    let (samples, mc_seed) = resolve_mc(a.output.mc_samples, a.output.mc_seed, file);
    let mut variants: Vec<(String, PerturbationSpec)> = P_STUDY_FIXED
        .iter()
        .map(|&(label, p)| Ok((label.to_string(), PerturbationSpec::fixed(instance.small_radius, p)?)))
        .collect::<Result<_>>()?;
    variants.push(("scheduled".into(), scheduled));

    let cells: Vec<(usize, u64)> = (0..variants.len()).flat_map(|v| seeds.iter().map(move |&s| (v, s))).collect();
    let results: Vec<Result<RunRecord>> = cells
        .par_iter()
        .map(|&(v, seed)| train(instance, variants[v].1.clone(), config.clone().with_seed(seed)))
        .collect();

    let dir = &a.output.out_dir;
    let mut summaries: Vec<VariantSummary> = variants
        .iter()
        .map(|(label, spec)| VariantSummary {
            label: label.clone(),
            schedule: spec.schedule.clone(),
            seeds: Vec::new(),
            final_overlaps: Vec::new(),
            best_overlaps: Vec::new(),
            final_spread: None,
            best_spread: None,
            failures: Vec::new(),
        })
        .collect();
    let mut labeled: Vec<(String, RunRecord)> = Vec::new();
    for (&(v, seed), result) in cells.iter().zip(results) {
        let stem = format!("pstudy_{}_seed{seed}", variants[v].0);
        let s = &mut summaries[v];
        match result {
            Ok(rec) => {
                write(&dir.join(format!("{stem}_trace.csv")), &trace_export(&rec))?;
                s.seeds.push(seed);
                s.final_overlaps.push(rec.metrics.final_overlap_length);
                s.best_overlaps.push(rec.metrics.best_overlap_length);
                labeled.push((variants[v].0.clone(), rec));
            }
            Err(e) => {
                if let Error::Aborted { record, .. } = &e {
                    write(&dir.join(format!("{stem}.json")), &record.to_json()?)?;
                }
                s.failures.push(format!("seed {seed}: {e}"));
            }
        }
    }
    if labeled.is_empty() {
        eprintln!("every p-study cell failed");
        for f in summaries.iter().flat_map(|s| &s.failures) {
            eprintln!("  {f}");
        }
        return Ok(EXIT_ABORTED);
    }
    for s in &mut summaries {
        s.final_spread = Spread::of(&s.final_overlaps);
        s.best_spread = Spread::of(&s.best_overlaps);
    }
    let median =
        |label: &str| summaries.iter().find(|s| s.label == label).and_then(|s| s.final_spread).map(|x| x.median);
    let trend = match (median("scheduled"), median("p1_10")) {
        (Some(a), Some(b)) => Some(a <= b),
        _ => None,
    };
    let refs: Vec<(&str, &RunRecord)> = labeled.iter().map(|(l, r)| (l.as_str(), r)).collect();
    let comparison = compare_labeled(&instance, &refs, samples.max(1), mc_seed, &ReferenceTable::default())?;
    let summary = PStudySummary {
        instance,
        epochs: config.epochs,
        variants: summaries,
        schedule_beats_fixed_tenth: trend,
        comparison,
    };

    let mut csv = String::from("variant,seed,final_overlap_length,best_overlap_length\n");
    for s in &summary.variants {
        for ((seed, f), b) in s.seeds.iter().zip(&s.final_overlaps).zip(&s.best_overlaps) {
            csv.push_str(&format!("{},{seed},{f:e},{b:e}\n", s.label));
        }
    }
    write(&dir.join("pstudy_summary.csv"), &csv)?;
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write(&dir.join("pstudy_summary.json"), &json)?;
    let text = p_study_text(&summary);
    write(&dir.join("pstudy_summary.txt"), &text)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn p_study_text(s: &PStudySummary) -> String {
    let mut out = format!(
        "p-study: {} extent={} N={} r={} epochs={}\n{:<10} {:>5} {:>14} {:>14} {:>14}\n",
        s.instance.container.label(),
        s.instance.container.extent,
        s.instance.count,
        s.instance.small_radius,
        s.epochs,
        "variant",
        "runs",
        "median_final",
        "min_final",
        "median_best"
    );
    for v in &s.variants {
        let f = v.final_spread.map(|x| (x.median, x.min)).unwrap_or((f64::NAN, f64::NAN));
        let b = v.best_spread.map(|x| x.median).unwrap_or(f64::NAN);
        out.push_str(&format!("{:<10} {:>5} {:>14.6e} {:>14.6e} {:>14.6e}\n", v.label, v.seeds.len(), f.0, f.1, b));
    }
    match s.schedule_beats_fixed_tenth {
        Some(true) => out.push_str("schedule median <= fixed p=1/10 median: yes\n"),
        Some(false) => out.push_str("schedule median <= fixed p=1/10 median: NO (flagged)\n"),
        None => out.push_str("schedule vs fixed p=1/10: not enough runs\n"),
    }
    out
}

fn bench_sweep(a: &BenchArgs, file: &FileConfig, seeds: &[u64]) -> Result<i32> {
    let counts = match a.counts.as_deref() {
        Some(text) => parse_counts(text)?,
        None => return Err(Error::InvalidArgument("--counts is required for the sweep".into())),
    };
    let instances: Vec<PackingInstance> =
        counts.iter().map(|&n| resolve_instance(&a.instance, file, Some(n))).collect::<Result<_>>()?;
    let baseline = resolve_baseline(&a.restarts, file)?;
    let (samples, mc_seed) = resolve_mc(a.output.mc_samples, a.output.mc_seed, file);
    let cells: Vec<(usize, bool, u64)> = (0..instances.len())
        .flat_map(|k| [true, false].into_iter().flat_map(move |packer| seeds.iter().map(move |&s| (k, packer, s))))
        .collect();
    let results: Vec<Result<RunRecord>> = cells
        .par_iter()
        .map(|&(k, packer, seed)| {
            let inst = instances[k];
            if packer {
                let (pspec, config) = resolve_train(&a.train, file, &inst)?;
                train(inst, pspec, config.with_seed(seed))
            } else {
                baseline_pack(&inst, &baseline.clone().with_seed(seed))
            }
        })
        .collect();

    let dir = &a.output.out_dir;
    let mut by_instance: Vec<Vec<RunRecord>> = vec![Vec::new(); instances.len()];
    let mut failures = Vec::new();
    for (&(k, packer, seed), result) in cells.iter().zip(results) {
        let stem = format!("sweep_N{}_{}_seed{seed}", instances[k].count, if packer { "pack" } else { "baseline" });
        match result {
            Ok(rec) => {
                write(&dir.join(format!("{stem}_trace.csv")), &trace_export(&rec))?;
                by_instance[k].push(rec);
            }
            Err(e) => failures.push(format!("{stem}: {e}")),
        }
    }
    if by_instance.iter().all(Vec::is_empty) {
        eprintln!("every sweep cell failed");
        for f in &failures {
            eprintln!("  {f}");
        }
        return Ok(EXIT_ABORTED);
    }
    let table = ReferenceTable::default();
    let reports: Vec<ComparisonReport> = instances
        .iter()
        .zip(&by_instance)
        .filter(|(_, recs)| !recs.is_empty())
        .map(|(inst, recs)| compare_with(inst, recs, samples.max(1), mc_seed, &table))
        .collect::<Result<_>>()?;
    let summary = SweepSummary { reports, failures };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write(&dir.join("sweep_report.json"), &json)?;
    let mut text = String::new();
    for r in &summary.reports {
        text.push_str(&r.to_text());
        text.push('\n');
    }
    for f in &summary.failures {
        text.push_str(&format!("failed: {f}\n"));
    }
    write(&dir.join("sweep_report.txt"), &text)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn load_layout(
    from_csv: Option<&Path>,
    run: Option<&Path>,
    instance: &InstanceArgs,
    final_layout: bool,
) -> Result<Layout> {
    match (from_csv, run) {
        (Some(csv), None) => {
            let file = FileConfig::load(instance.config.as_deref())?;
            let centers: Vec<Point> = centers_from_csv(&std::fs::read_to_string(csv)?)?;
            let inst = resolve_instance(instance, &file, Some(instance.count.or(file.count).unwrap_or(centers.len())))?;
            Layout::new(inst, centers)
        }
        (None, Some(path)) => {
            let rec = RunRecord::read_json(path)?;
            if final_layout {
                rec.final_layout()
            } else {
                rec.best_layout()
            }
        }
        _ => Err(Error::InvalidArgument("give exactly one of --from-csv or --run".into())),
    }
}

pub fn cmd_density(a: &DensityArgs) -> Result<i32> {
    let file = FileConfig::load(a.instance.config.as_deref())?;
    let layout = load_layout(a.from_csv.as_deref(), a.run.as_deref(), &a.instance, false)?;
    let (samples, seed) = resolve_mc(a.mc_samples, a.mc_seed, &file);
    let report: DensityReport = density_report(&layout, samples, seed)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    if let Some(out) = &a.out {
        write(out, &json)?;
    }
    print!("{json}");
    Ok(EXIT_OK)
}

pub fn cmd_render(a: &RenderArgs) -> Result<i32> {
    let layout = load_layout(a.from_csv.as_deref(), a.run.as_deref(), &a.instance, a.final_layout)?;
    write(&a.out, &render_svg(&layout, &RenderStyle::default())?)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("circlepack").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"container": "box", "dim": 3, "s": 2.0, "N": 5, "r": 0.3, "epochs": 7}"#).unwrap();
        let cli = parse(&["pack", "--config", cfg.to_str().unwrap(), "--r", "0.25", "--epochs", "9"]);
        let Command::Pack(a) = cli.command else { panic!() };
        let file = FileConfig::load(a.instance.config.as_deref()).unwrap();
        let inst = resolve_instance(&a.instance, &file, None).unwrap();
        assert_eq!(inst.container, Container::cube(3, 2.0).unwrap());
        assert_eq!((inst.count, inst.small_radius), (5, 0.25));
        let (pspec, config) = resolve_train(&a.train, &file, &inst).unwrap();
        assert_eq!(config.epochs, 9);
        assert_eq!(pspec.schedule, vec![(0, 2.0), (4, 0.2)]);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"radius": 1}"#).unwrap();
        assert!(FileConfig::load(Some(&cfg)).is_err());
    }

    #[test]
    fn seed_lists_and_counts() {
        let file = FileConfig::default();
        let s = |seed, seeds: Option<&str>| SeedArgs { seed, seeds: seeds.map(String::from) };
        assert_eq!(resolve_seeds(&s(None, None), &file).unwrap(), vec![0]);
        assert_eq!(resolve_seeds(&s(Some(4), None), &file).unwrap(), vec![4]);
        assert_eq!(resolve_seeds(&s(None, Some("1, 2,3")), &file).unwrap(), vec![1, 2, 3]);
        assert!(resolve_seeds(&s(None, Some("")), &file).is_err());
        assert!(resolve_seeds(&s(None, Some("1,x")), &file).is_err());
        assert_eq!(parse_counts("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_counts("7,13").unwrap(), vec![7, 13]);
        assert!(parse_counts("5..2").is_err());
        assert!(parse_counts(",").is_err());
    }

    #[test]
    fn container_extent_flags_must_match_kind() {
        let file = FileConfig::default();
        let a = InstanceArgs { side: Some(1.0), count: Some(2), radius: Some(0.1), ..Default::default() };
        assert!(resolve_instance(&a, &file, None).is_err());
        let missing_r = InstanceArgs { count: Some(2), ..Default::default() };
        assert!(resolve_instance(&missing_r, &file, None).is_err());
    }

    #[test]
    fn invalid_arguments_exit_with_two() {
        assert_eq!(run(["circlepack", "pack", "--N", "3"]), EXIT_USAGE);
        assert_eq!(run(["circlepack", "pack", "--N", "3", "--r", "2", "--R", "1"]), EXIT_USAGE);
        assert_eq!(run(["circlepack", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["circlepack", "bench", "--seeds", "", "--N", "3", "--r", "0.1"]), EXIT_USAGE);
    }
}
