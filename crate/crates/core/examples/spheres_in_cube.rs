//! Fifteen spheres in the unit cube at the best-known radius. An exact
//! construction on the 1/13 grid (tangent pairs are 5/13 apart, one sphere
//! floats at the center) gives a gap-free layout whose Monte Carlo density
//! must match `N·(4/3)πr³`. The baseline is run on the same instance for
//! comparison.
//!
//! ```text
//! cargo run --release --example spheres_in_cube
//! ```

use circlepack::baseline::{baseline_pack, BaselineConfig};
use circlepack::metrics::{density_report, DensityReport, ReferenceTable};
use circlepack::{Container, Layout, PackingInstance};

const GRID: [[i32; 3]; 15] = [
    [-4, 0, -4],
    [-1, -4, -4],
    [0, 0, 0],
    [4, -4, 1],
    [-4, 4, 4],
    [4, 1, -4],
    [0, 4, -4],
    [0, -4, 4],
    [4, 0, 4],
    [4, 4, 0],
    [-4, 4, -1],
    [-4, -4, 0],
    [4, -4, -4],
    [1, 4, 4],
    [-4, -1, 4],
];

fn show(label: &str, d: &DensityReport) {
    let z = (d.density - d.formula_density) / d.std_error;
    println!(
        "{label:<12} overlap {:.2e}  formula {:.6}  monte carlo {:.6} ± {:.1e} ({z:+.2}σ)",
        d.overlap_length, d.formula_density, d.density, d.std_error
    );
}

fn main() -> circlepack::Result<()> {
    let cube = Container::cube(3, 1.0)?;
    let r = ReferenceTable::default().get(cube.kind, 3, 15).expect("table entry").radius_for(&cube);
    let instance = PackingInstance::new(cube, 15, r)?;
    println!("15 spheres of radius {r} in the unit cube");

    let centers = GRID.iter().map(|p| p.iter().map(|&k| k as f64 / 13.0).collect()).collect();
    let exact = Layout::new(instance, centers)?;
    show("grid", &density_report(&exact, 2_000_000, 11)?);

    let record = baseline_pack(&instance, &BaselineConfig::default().with_seed(3))?;
    show("baseline", &density_report(&record.best_layout()?, 2_000_000, 11)?);
    Ok(())
}
