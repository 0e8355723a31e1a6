//! SVG 1.1 figures of a layout.
//!
//! Each view is an 800×800 canvas with the container scaled to 90% of it and
//! the y axis pointing up. Small objects are filled at 40% opacity so that
//! overlaps read darker, and the container center carries a red cross.
//! Three-dimensional layouts are drawn as three orthographic views (xy, xz,
//! yz) side by side; within a view discs are painted back to front and
//! nearer discs are more opaque.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ContainerKind, Layout};

/// Side length of one view, in SVG user units.
pub const CANVAS: f64 = 800.0;
/// Fraction of the canvas spanned by the container.
pub const CONTAINER_FILL: f64 = 0.9;
pub const CIRCLE_OPACITY: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    /// Required to draw 3D layouts; without it only 2D layouts render.
    pub orthographic_3d: bool,
    pub fill: String,
    pub stroke: String,
    pub title: Option<String>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self { orthographic_3d: true, fill: "#1f77b4".into(), stroke: "#000000".into(), title: None }
    }
}

/// Maps container coordinates onto one view.
struct View {
    offset_x: f64,
    scale: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        self.offset_x + CANVAS / 2.0 + x * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        CANVAS / 2.0 - y * self.scale
    }
}

pub fn render_svg(layout: &Layout, style: &RenderStyle) -> Result<String> {
    let inst = &layout.instance;
    let dim = inst.dim();
    let axes: &[(usize, usize, Option<usize>)] = match dim {
        2 => &[(0, 1, None)],
        3 if style.orthographic_3d => &[(0, 1, Some(2)), (0, 2, Some(1)), (1, 2, Some(0))],
        3 => return Err(Error::InvalidArgument("3D layouts need the orthographic style".into())),
        d => return Err(Error::InvalidArgument(format!("cannot render dimension {d}"))),
    };
    let half = inst.container.admissible_radius();
    let scale = CONTAINER_FILL * CANVAS / (2.0 * half);
    let r = inst.small_radius;

    let mut out = String::new();
    writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##).unwrap();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"##,
        w = CANVAS * axes.len() as f64,
        h = CANVAS
    )
    .unwrap();
    if let Some(title) = &style.title {
        writeln!(out, "  <title>{}</title>", escape(title)).unwrap();
    }
    writeln!(out, r##"  <rect x="0" y="0" width="{}" height="{CANVAS}" fill="#ffffff"/>"##, CANVAS * axes.len() as f64)
        .unwrap();

    for (k, &(a, b, depth)) in axes.iter().enumerate() {
        let view = View { offset_x: k as f64 * CANVAS, scale };
        writeln!(out, "  <g>").unwrap();
        match inst.container.kind {
            ContainerKind::Ball => writeln!(
                out,
                r##"    <circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="{}" stroke-width="2"/>"##,
                view.x(0.0),
                view.y(0.0),
                half * scale,
                style.stroke
            ),
            ContainerKind::Box => writeln!(
                out,
                r##"    <rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="{}" stroke-width="2"/>"##,
                view.x(-half),
                view.y(half),
                2.0 * half * scale,
                2.0 * half * scale,
                style.stroke
            ),
        }
        .unwrap();

        let mut order: Vec<usize> = (0..layout.centers.len()).collect();
        if let Some(d) = depth {
            // Far (most negative depth) first so near discs paint on top.
            order.sort_by(|&i, &j| layout.centers[i][d].total_cmp(&layout.centers[j][d]).then(i.cmp(&j)));
        }
        for i in order {
            let c = &layout.centers[i];
            let opacity = match depth {
                None => CIRCLE_OPACITY,
                Some(d) => depth_opacity(c[d], half),
            };
            writeln!(
                out,
                r##"    <circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="{}" fill-opacity="{:.3}" stroke="{}" stroke-width="1"/>"##,
                view.x(c[a]),
                view.y(c[b]),
                r * scale,
                style.fill,
                opacity,
                style.stroke
            )
            .unwrap();
        }

        let (cx, cy, m) = (view.x(0.0), view.y(0.0), 6.0);
        writeln!(
            out,
            r##"    <path d="M {:.3} {cy:.3} L {:.3} {cy:.3} M {cx:.3} {:.3} L {cx:.3} {:.3}" stroke="#ff0000" stroke-width="2"/>"##,
            cx - m,
            cx + m,
            cy - m,
            cy + m
        )
        .unwrap();
        if depth.is_some() {
            let names = ["x", "y", "z"];
            writeln!(
                out,
                r##"    <text x="{:.3}" y="24" font-family="sans-serif" font-size="18">{}{}</text>"##,
                view.offset_x + 12.0,
                names[a],
                names[b]
            )
            .unwrap();
        }
        writeln!(out, "  </g>").unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Opacity for a disc at depth `z ∈ [-half, half]`, averaging
/// [`CIRCLE_OPACITY`] across the container.
fn depth_opacity(z: f64, half: f64) -> f64 {
    let t = if half > 0.0 { (z / half).clamp(-1.0, 1.0) } else { 0.0 };
    CIRCLE_OPACITY + 0.15 * t
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
