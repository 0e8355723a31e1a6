//! Acceptance criteria. Each criterion prints one line; the process exits
//! non-zero if any hard criterion fails. Criterion 6 is soft: a miss is
//! reported as FLAG and does not fail the run.
//!
//! ```text
//! cargo test --test acceptance
//! ```

mod common;

use std::time::{Duration, Instant};

use circlepack::baseline::{baseline_pack, restart_overlaps, BaselineConfig};
use circlepack::geometry::{lens_area, lens_volume, norm2, Container, Layout, PackingInstance};
use circlepack::metrics::{density_report, Spread};
use circlepack::packer::{draw_perturbation_batch, sample_perturbation, PerturbationSpec, TrainConfig, Trainer};
use circlepack::record::{centers_to_csv, RunRecord};
use circlepack::render::{render_svg, RenderStyle};
use circlepack::train;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Packer seeds used wherever a criterion asks for five seeds.
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const EPOCHS: usize = 20_000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    soft: bool,
    run: fn() -> Outcome,
}

fn packer_runs(instance: PackingInstance, seeds: &[u64]) -> Vec<RunRecord> {
    seeds
        .iter()
        .map(|&seed| {
            let config = TrainConfig::default().with_seed(seed).with_epochs(EPOCHS);
            let pspec = PerturbationSpec::two_phase(instance.small_radius, EPOCHS).unwrap();
            train(instance, pspec, config).unwrap()
        })
        .collect()
}

fn disk(big: f64, count: usize, r: f64) -> PackingInstance {
    PackingInstance::new(Container::ball(2, big).unwrap(), count, r).unwrap()
}

/// Criterion 1: Lens area and volume against a 10⁷-sample Monte Carlo oracle, to
/// three significant figures.
fn geometry_oracle() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for dim in [2usize, 3] {
        for (k, ratio) in [0.2, 1.0, 1.8].into_iter().enumerate() {
            let exact = if dim == 2 { lens_area(ratio, 1.0) } else { lens_volume(ratio, 1.0) };
            let mc = common::lens_oracle(dim, ratio, 1.0, 10_000_000, 40 + 10 * dim as u64 + k as u64);
            let ok = (mc - exact).abs() <= common::three_sig_fig_tolerance(exact);
            pass &= ok;
            parts.push(format!("{dim}D d/r={ratio}: {exact:.5} vs {mc:.5}"));
        }
    }
    Outcome::new(pass, parts.join("; "))
}

/// Criterion 2: Full-model gradients against central differences, N = 5, frozen W.
fn gradient_check() -> Outcome {
    let instance = disk(1.0, 5, 0.3);
    let (mut worst, mut kinks): (f64, usize) = (0.0, 0);
    for seed in [0u64, 1, 2] {
        let config = TrainConfig::default().with_seed(seed).with_epochs(EPOCHS);
        let mut t = Trainer::new(instance, PerturbationSpec::two_phase(0.3, EPOCHS).unwrap(), config).unwrap();
        for _ in 0..500 {
            t.train_epoch().unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let w = draw_perturbation_batch(5, 0.3, 2.0, 2, &mut rng);
        let errors = common::model_gradient_errors(&t.model, &w, 1e-6);
        worst = errors.per_tensor.iter().fold(worst, |m, &e| m.max(e));
        kinks += errors.kinks;
    }
    Outcome::new(
        worst < 1e-3,
        format!(
            "max relative error {worst:.2e} over 13 tensors × 3 models (limit 1e-3), {kinks} entries on a ReLU kink"
        ),
    )
}

/// Criterion 3: Radial KS test for p ∈ {2, 1/2, 1/5} and a 16-bin angular chi-square.
fn sampler_law() -> Outcome {
    let draws = 100_000;
    let critical = common::ks_critical(draws, 0.01);
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, p) in [2.0, 0.5, 0.2].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + k as u64);
        let radii = (0..draws).map(|_| norm2(&sample_perturbation(1.0, p, 2, &mut rng))).collect();
        let d = common::ks_statistic(radii, |u| u.clamp(0.0, 1.0).powf(1.0 / p));
        pass &= d < critical;
        parts.push(format!("KS p={p}: D={d:.4}"));
    }
    let bins = 16;
    let mut counts = vec![0usize; bins];
    let mut rng = ChaCha8Rng::seed_from_u64(310);
    for _ in 0..draws {
        let w = sample_perturbation(1.0, 0.5, 2, &mut rng);
        let t = w[1].atan2(w[0]).rem_euclid(std::f64::consts::TAU);
        counts[((t / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = draws as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let chi_critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
    pass &= chi2 < chi_critical;
    parts.push(format!("critical D={critical:.4}; chi2={chi2:.2} (critical {chi_critical:.2})"));
    Outcome::new(pass, parts.join(", "))
}

/// Criterion 4: Feasible instances at 95% of the optimal ratio.
fn known_optima() -> Outcome {
    let optima = [(2usize, 0.5), (3, 2.0 * 3f64.sqrt() - 3.0), (4, 2f64.sqrt() - 1.0), (7, 1.0 / 3.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, ratio) in optima {
        let inst = disk(1.0, n, 0.95 * ratio);
        let packer =
            packer_runs(inst, &SEEDS).iter().filter(|rec| rec.best_overlap_length() < 1e-3 * inst.small_radius).count();
        let baseline =
            restart_overlaps(&inst, &BaselineConfig::default()).unwrap().into_iter().filter(|&o| o < 1e-6).count();
        pass &= packer >= 3 && baseline >= 9;
        parts.push(format!("N={n}: packer {packer}/5, baseline {baseline}/10"));
    }
    Outcome::new(pass, parts.join("; "))
}

/// Criterion 5: Infeasible instances in R = 0.9: the packer's best overlap is within
/// 25% of the baseline's best, and both are positive.
fn infeasible_parity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, r) in [(7usize, 0.33333), (13, 0.2360679775), (14, 0.2310307)] {
        let inst = disk(0.9, n, r);
        let packer = packer_runs(inst, &SEEDS).iter().map(RunRecord::best_overlap_length).fold(f64::INFINITY, f64::min);
        let baseline = SEEDS
            .iter()
            .map(|&s| baseline_pack(&inst, &BaselineConfig::default().with_seed(s)).unwrap().best_overlap_length())
            .fold(f64::INFINITY, f64::min);
        let ok = packer > 0.0 && baseline > 0.0 && packer <= 1.25 * baseline;
        pass &= ok;
        parts.push(format!("N={n}: packer {packer:.4} vs baseline {baseline:.4} (ratio {:.3})", packer / baseline));
    }
    Outcome::new(pass, parts.join("; "))
}

/// Criterion 6: (soft) Scheduled p against fixed p = 1/10 on the thirteen-circle instance.
fn p_schedule_trend() -> Outcome {
    let inst = disk(0.9, 13, 0.2360679775);
    let median = |pspec: &PerturbationSpec| {
        let finals: Vec<f64> = SEEDS
            .iter()
            .map(|&s| {
                let config = TrainConfig::default().with_seed(s).with_epochs(EPOCHS);
                train(inst, pspec.clone(), config).unwrap().metrics.final_overlap_length
            })
            .collect();
        Spread::of(&finals).unwrap().median
    };
    let scheduled = median(&PerturbationSpec::two_phase(inst.small_radius, EPOCHS).unwrap());
    let fixed = median(&PerturbationSpec::fixed(inst.small_radius, 0.1).unwrap());
    Outcome::new(
        scheduled <= fixed,
        format!("median final overlap: schedule 2→1/5 {scheduled:.4}, fixed 1/10 {fixed:.4}"),
    )
}

/// Criterion 7: Monte Carlo density of a gap-free fifteen-sphere layout, and of one ball.
fn density_pipeline() -> Outcome {
    let r = 0.192307692;
    let cube = Container::cube(3, 1.0).unwrap();
    let layout = Layout::new(PackingInstance::new(cube, 15, r).unwrap(), common::cube15_centers()).unwrap();
    let d = density_report(&layout, 2_000_000, 0).unwrap();
    let exact = 20.0 * std::f64::consts::PI * r.powi(3);
    let formula_ok =
        d.overlap_measure == 0.0 && (d.formula_density - exact).abs() < 1e-12 && (exact - 0.4468).abs() < 1e-3;
    let z = (d.density - d.formula_density) / d.std_error;

    let single = Layout::new(PackingInstance::new(cube, 1, 0.3).unwrap(), vec![vec![0.0; 3]]).unwrap();
    let s = density_report(&single, 2_000_000, 0).unwrap();
    let ball = 4.0 / 3.0 * std::f64::consts::PI * 0.3f64.powi(3);
    let zs = (s.density - ball) / s.std_error;
    Outcome::new(
        formula_ok && z.abs() <= 3.0 && zs.abs() <= 3.0,
        format!(
            "15 spheres: MC {:.5} vs formula {:.5} ({z:+.2}σ); one ball: {:.5} vs {ball:.5} ({zs:+.2}σ)",
            d.density, d.formula_density, s.density
        ),
    )
}

/// Criterion 8: Containment, α constraint, finite loss at every epoch; byte-identical
/// records and artifacts under fixed seeds.
fn invariants() -> Outcome {
    let cube = Container::cube(3, 1.0).unwrap();
    let instances = [disk(0.9, 7, 0.33333), PackingInstance::new(cube, 15, 0.192307692).unwrap()];
    let mut violations = Vec::new();
    let mut epochs = 0;
    for inst in instances {
        let config = TrainConfig::default().with_seed(11).with_epochs(3000);
        let mut t = Trainer::new(inst, PerturbationSpec::two_phase(inst.small_radius, 3000).unwrap(), config).unwrap();
        let bound = inst.center_bound();
        for _ in 0..3000 {
            let stats = t.train_epoch().unwrap();
            epochs += 1;
            if !stats.loss.is_finite() {
                violations.push(format!("non-finite loss at {}", t.epoch()));
            }
            if !t.model.alpha_feasible() {
                violations.push(format!("alpha outside bound at {}", t.epoch()));
            }
            if t.model.encode_centers().unwrap().iter().any(|c| inst.container.constraint_norm(c) > bound) {
                violations.push(format!("center outside bound at {}", t.epoch()));
            }
            if stats.input_extent > inst.container.admissible_radius() + 1e-12 {
                violations.push(format!("perturbed input outside container at {}", t.epoch()));
            }
        }
    }

    let inst = disk(0.9, 7, 0.33333);
    let run = || {
        let config = TrainConfig::default().with_seed(5).with_epochs(2000);
        let rec = train(inst, PerturbationSpec::two_phase(inst.small_radius, 2000).unwrap(), config).unwrap();
        let svg = render_svg(&rec.best_layout().unwrap(), &RenderStyle::default()).unwrap();
        (rec.to_json().unwrap(), centers_to_csv(&rec.best_centers), svg)
    };
    if run() != run() {
        violations.push("packer artifacts differ between identical runs".into());
    }
    let base = || baseline_pack(&inst, &BaselineConfig::default().with_seed(5)).unwrap().to_json().unwrap();
    if base() != base() {
        violations.push("baseline records differ between identical runs".into());
    }

    let cli: &[&str] = &[
        "pack",
        "--R",
        "0.9",
        "--N",
        "7",
        "--r",
        "0.33333",
        "--seed",
        "2",
        "--epochs",
        "1000",
        "--mc-samples",
        "100000",
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_circlepack"))
            .args(cli)
            .arg("--out-dir")
            .arg(d.path())
            .output()
            .unwrap()
            .status;
        if !status.success() {
            violations.push(format!("cli exited with {status}"));
        }
    }
    for name in ["pack_seed2.json", "pack_seed2_centers.csv", "pack_seed2_trace.csv", "pack_seed2.svg"] {
        if std::fs::read(dirs[0].path().join(name)).ok() != std::fs::read(dirs[1].path().join(name)).ok() {
            violations.push(format!("{name} differs between identical cli runs"));
        }
    }
    let detail = if violations.is_empty() {
        format!("{epochs} epochs checked; packer, baseline and cli artifacts byte-identical")
    } else {
        violations.iter().take(5).cloned().collect::<Vec<_>>().join("; ")
    };
    Outcome::new(violations.is_empty(), detail)
}

/// Criterion 9: Fifteen spheres in the unit sphere: overlap falls by 90% from epoch 0.
fn three_d_sanity() -> Outcome {
    let inst = PackingInstance::new(Container::ball(3, 1.0).unwrap(), 15, 0.95 * 0.318304823).unwrap();
    let reductions: Vec<f64> = packer_runs(inst, &SEEDS)
        .iter()
        .map(|rec| 1.0 - rec.best_overlap_length() / rec.trace[0].overlap_length)
        .collect();
    let hits = reductions.iter().filter(|&&x| x >= 0.9).count();
    let shown: Vec<String> = reductions.iter().map(|x| format!("{:.1}%", 100.0 * x)).collect();
    Outcome::new(hits >= 3, format!("{hits}/5 seeds reduce overlap by ≥ 90% ({})", shown.join(", ")))
}

fn main() {
    let minute = Duration::from_secs(60);
    let criteria = [
        Criterion { id: 1, name: "geometry oracle agreement", budget: minute, soft: false, run: geometry_oracle },
        Criterion { id: 2, name: "gradient correctness", budget: minute, soft: false, run: gradient_check },
        Criterion { id: 3, name: "sampler law", budget: minute, soft: false, run: sampler_law },
        Criterion { id: 4, name: "known-optimum feasibility", budget: 10 * minute, soft: false, run: known_optima },
        Criterion {
            id: 5,
            name: "infeasible-instance parity",
            budget: 15 * minute,
            soft: false,
            run: infeasible_parity,
        },
        Criterion { id: 6, name: "p-schedule trend (soft)", budget: 15 * minute, soft: true, run: p_schedule_trend },
        Criterion { id: 7, name: "density pipeline", budget: minute, soft: false, run: density_pipeline },
        Criterion { id: 8, name: "invariant suite", budget: 5 * minute, soft: false, run: invariants },
        Criterion { id: 9, name: "3D sanity", budget: 10 * minute, soft: false, run: three_d_sanity },
    ];

    println!("running {} acceptance criteria", criteria.len());
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = outcome.pass && in_time;
        let status = match (pass, c.soft) {
            (true, _) => "PASS",
            (false, true) => "FLAG",
            (false, false) => "FAIL",
        };
        let timing = if in_time { String::new() } else { format!(" [over budget {}s]", c.budget.as_secs()) };
        println!("criterion {} {status} {}: {} ({:.1}s){timing}", c.id, c.name, outcome.detail, elapsed.as_secs_f64());
        if !pass && !c.soft {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all hard criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
