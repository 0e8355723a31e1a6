//! Draw hand-placed layouts: the hexagonal seven-circle packing and two
//! spheres in a cube (three orthographic views).
//!
//! ```text
//! cargo run --release --example render_layouts -- [out_dir]
//! ```

use std::f64::consts::PI;

use circlepack::render::{render_svg, RenderStyle};
use circlepack::{Container, Layout, PackingInstance};

fn main() -> circlepack::Result<()> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/render_layouts".into()));
    std::fs::create_dir_all(&out)?;

    // One circle at the center, six around it touching the container.
    let r = 1.0 / 3.0;
    let mut centers = vec![vec![0.0, 0.0]];
    centers.extend((0..6).map(|k| {
        let t = k as f64 * PI / 3.0;
        vec![2.0 * r * t.cos(), 2.0 * r * t.sin()]
    }));
    let hexagon = Layout::new(PackingInstance::new(Container::ball(2, 1.0)?, 7, r)?, centers)?;
    let style = RenderStyle { title: Some("seven circles, r = 1/3".into()), ..Default::default() };
    std::fs::write(out.join("hexagon.svg"), render_svg(&hexagon, &style)?)?;

    let spheres = Layout::new(
        PackingInstance::new(Container::cube(3, 1.0)?, 2, 0.25)?,
        vec![vec![-0.2, -0.2, -0.2], vec![0.2, 0.2, 0.2]],
    )?;
    std::fs::write(out.join("spheres.svg"), render_svg(&spheres, &RenderStyle::default())?)?;
    println!("wrote {}/hexagon.svg and spheres.svg", out.display());
    Ok(())
}
