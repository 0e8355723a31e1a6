//! Containers, containment projection and pairwise overlap measures.
//!
//! All geometry is 64-bit. A [`Container`] is either a ball centered at the
//! origin or the axis-aligned box `[-s/2, s/2]^n`. Small balls all share the
//! same radius `r`, so the feasible set for centers is the container eroded by
//! `r`: the ball of radius `R - r` or the box `[-(s/2 - r), s/2 - r]^n`.

mod montecarlo;

pub use montecarlo::{mc_density, mc_density_of, sample_in_ball, sample_in_container, uniform_direction, McDensity};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Absolute tolerance used for all containment checks.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// A point in R^n, n in {2, 3}.
pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainerKind {
    Ball,
    Box,
}

impl ContainerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContainerKind::Ball => "ball",
            ContainerKind::Box => "box",
        }
    }
}

impl std::fmt::Display for ContainerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ContainerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ball" | "circle" | "sphere" => Ok(ContainerKind::Ball),
            "box" | "square" | "cube" => Ok(ContainerKind::Box),
            other => Err(Error::InvalidInstance(format!("unknown container kind `{other}`"))),
        }
    }
}

/// The large object. `extent` is the radius for a ball and the side length
/// for a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Container {
    pub kind: ContainerKind,
    pub dim: usize,
    pub extent: f64,
}

impl Container {
    pub fn new(kind: ContainerKind, dim: usize, extent: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidInstance(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidInstance(format!("container extent must be positive, got {extent}")));
        }
        Ok(Self { kind, dim, extent })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(ContainerKind::Ball, dim, radius)
    }

    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        Self::new(ContainerKind::Box, dim, side)
    }

    /// Largest small radius that fits at all: `R` for a ball, `s/2` for a box.
    pub fn admissible_radius(&self) -> f64 {
        match self.kind {
            ContainerKind::Ball => self.extent,
            ContainerKind::Box => self.extent / 2.0,
        }
    }

    /// Bound on the center norm (`‖c‖₂` for ball, `‖c‖∞` for box) once the
    /// container is eroded by `r`.
    pub fn center_bound(&self, r: f64) -> f64 {
        (self.admissible_radius() - r).max(0.0)
    }

    /// Lebesgue measure of the container.
    pub fn volume(&self) -> f64 {
        match self.kind {
            ContainerKind::Ball => ball_volume(self.dim, self.extent),
            ContainerKind::Box => self.extent.powi(self.dim as i32),
        }
    }

    /// Whether `point` lies in the container itself (not eroded).
    pub fn contains(&self, point: &[f64]) -> bool {
        match self.kind {
            ContainerKind::Ball => norm2(point) <= self.extent,
            ContainerKind::Box => norm_inf(point) <= self.extent / 2.0,
        }
    }

    /// Whether `center` is a feasible center for a ball of radius `r`.
    pub fn is_feasible_center(&self, center: &[f64], r: f64) -> bool {
        let bound = self.center_bound(r) + CONTAINMENT_TOL;
        match self.kind {
            ContainerKind::Ball => norm2(center) <= bound,
            ContainerKind::Box => norm_inf(center) <= bound,
        }
    }

    /// Norm that the container's constraint is stated in.
    pub fn constraint_norm(&self, v: &[f64]) -> f64 {
        match self.kind {
            ContainerKind::Ball => norm2(v),
            ContainerKind::Box => norm_inf(v),
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}d", self.kind, self.dim)
    }
}

/// Problem statement: `count` balls of radius `small_radius` in `container`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingInstance {
    pub container: Container,
    pub count: usize,
    pub small_radius: f64,
}

impl PackingInstance {
    pub fn new(container: Container, count: usize, small_radius: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInstance("count must be at least 1".into()));
        }
        if !(small_radius.is_finite() && small_radius > 0.0) {
            return Err(Error::InvalidInstance(format!("small radius must be positive, got {small_radius}")));
        }
        if small_radius > container.admissible_radius() {
            return Err(Error::InvalidInstance(format!(
                "small radius {small_radius} exceeds admissible radius {} of the container",
                container.admissible_radius()
            )));
        }
        Ok(Self { container, count, small_radius })
    }

    pub fn dim(&self) -> usize {
        self.container.dim
    }

    pub fn center_bound(&self) -> f64 {
        self.container.center_bound(self.small_radius)
    }

    pub fn small_ball_volume(&self) -> f64 {
        ball_volume(self.dim(), self.small_radius)
    }

    pub fn same_as(&self, other: &PackingInstance) -> bool {
        self == other
    }
}

/// Which pairwise measure [`total_overlap`] sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapMeasure {
    /// `Σ max(0, 2r − d_ij)`.
    Length,
    /// Lens area in 2D, lens volume in 3D.
    AreaOrVolume,
}

/// N centers for an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub instance: PackingInstance,
    pub centers: Vec<Point>,
}

impl Layout {
    /// Builds a layout, checking the count, dimensions and containment.
    pub fn new(instance: PackingInstance, centers: Vec<Point>) -> Result<Self> {
        if centers.len() != instance.count {
            return Err(Error::InvalidLayout(format!("expected {} centers, got {}", instance.count, centers.len())));
        }
        for (i, c) in centers.iter().enumerate() {
            if c.len() != instance.dim() {
                return Err(Error::InvalidLayout(format!(
                    "center {i} has dimension {}, expected {}",
                    c.len(),
                    instance.dim()
                )));
            }
            if !c.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidLayout(format!("center {i} is not finite")));
            }
            if !instance.container.is_feasible_center(c, instance.small_radius) {
                return Err(Error::InvalidLayout(format!(
                    "center {i} violates containment: norm {} > bound {}",
                    instance.container.constraint_norm(c),
                    instance.center_bound()
                )));
            }
        }
        Ok(Self { instance, centers })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn total_overlap(&self, measure: OverlapMeasure) -> f64 {
        total_overlap(self, measure)
    }

    /// Overlap lengths of all overlapping pairs, in `(i, j)` order.
    pub fn pairwise_overlaps(&self) -> Vec<f64> {
        let r = self.instance.small_radius;
        let mut out = Vec::new();
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                let e = overlap_length(&self.centers[i], &self.centers[j], r);
                if e > 0.0 {
                    out.push(e);
                }
            }
        }
        out
    }

    /// True when some three balls pairwise overlap, a necessary condition for
    /// the pairwise density formula to undercount.
    pub fn has_mutual_triple(&self) -> bool {
        let n = self.centers.len();
        let r = self.instance.small_radius;
        let touching = |i: usize, j: usize| overlap_length(&self.centers[i], &self.centers[j], r) > 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                if !touching(i, j) {
                    continue;
                }
                for k in (j + 1)..n {
                    if touching(i, k) && touching(j, k) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Volume of a `dim`-ball (area for `dim = 2`).
pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        2 => PI * radius * radius,
        3 => 4.0 / 3.0 * PI * radius.powi(3),
        _ => panic!("ball_volume supports dim 2 or 3, got {dim}"),
    }
}

/// Euclidean projection of `point` onto the feasible center set for radius `r`.
pub fn project_center(point: &[f64], container: &Container, r: f64) -> Point {
    let bound = container.center_bound(r);
    match container.kind {
        ContainerKind::Ball => {
            let n = norm2(point);
            if n <= bound {
                point.to_vec()
            } else {
                let scale = bound / n;
                point.iter().map(|x| x * scale).collect()
            }
        }
        ContainerKind::Box => point.iter().map(|x| x.clamp(-bound, bound)).collect(),
    }
}

/// `max(0, 2r − ‖c_i − c_j‖₂)`.
pub fn overlap_length(ci: &[f64], cj: &[f64], r: f64) -> f64 {
    (2.0 * r - distance(ci, cj)).max(0.0)
}

/// Intersection area of two circles of radius `r` whose centers are `d` apart.
pub fn lens_area(d: f64, r: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    let d = d.max(0.0);
    let a = 2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt();
    a.max(0.0)
}

/// Intersection volume of two spheres of radius `r` whose centers are `d` apart.
pub fn lens_volume(d: f64, r: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    let d = d.max(0.0);
    PI * (2.0 * r - d).powi(2) * (d + 4.0 * r) / 12.0
}

/// Pairwise overlap measure for the layout's dimension.
pub fn pair_overlap(ci: &[f64], cj: &[f64], r: f64, measure: OverlapMeasure) -> f64 {
    match measure {
        OverlapMeasure::Length => overlap_length(ci, cj, r),
        OverlapMeasure::AreaOrVolume => {
            let d = distance(ci, cj);
            match ci.len() {
                2 => lens_area(d, r),
                3 => lens_volume(d, r),
                n => panic!("unsupported dimension {n}"),
            }
        }
    }
}

/// Sum of the chosen pairwise measure over all unordered pairs.
pub fn total_overlap(layout: &Layout, measure: OverlapMeasure) -> f64 {
    total_overlap_of(&layout.centers, layout.instance.small_radius, measure)
}

/// [`total_overlap`] on bare centers.
pub fn total_overlap_of(centers: &[Point], r: f64, measure: OverlapMeasure) -> f64 {
    let mut total = 0.0;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            total += pair_overlap(&centers[i], &centers[j], r, measure);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ball2(r: f64) -> Container {
        Container::ball(2, r).unwrap()
    }

    #[test]
    fn projection_examples() {
        let c = ball2(1.0);
        assert_eq!(project_center(&[0.0, 0.0], &c, 0.25), vec![0.0, 0.0]);
        let p = project_center(&[2.0, 0.0], &c, 0.25);
        assert_abs_diff_eq!(p[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
        let b = Container::cube(2, 1.0).unwrap();
        let p = project_center(&[0.9, -0.9], &b, 0.2);
        assert_abs_diff_eq!(p[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], -0.3, epsilon = 1e-15);
    }

    #[test]
    fn overlap_length_examples() {
        let r = 0.3;
        assert_eq!(overlap_length(&[0.0, 0.0], &[2.0 * r, 0.0], r), 0.0);
        assert_eq!(overlap_length(&[0.1, 0.2], &[0.1, 0.2], r), 2.0 * r);
        let e = overlap_length(&[0.0, 0.0], &[0.6, 0.0], 0.33333);
        assert_abs_diff_eq!(e, 0.06666, epsilon = 1e-12);
    }

    #[test]
    fn lens_closed_forms() {
        assert_abs_diff_eq!(lens_area(0.0, 1.0), PI, epsilon = 1e-14);
        assert_eq!(lens_area(2.0, 1.0), 0.0);
        assert_abs_diff_eq!(lens_area(1.0, 1.0), 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(lens_volume(0.0, 1.0), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_eq!(lens_volume(1.4, 0.7), 0.0);
        assert_abs_diff_eq!(lens_volume(1.0, 1.0), 5.0 * PI / 12.0, epsilon = 1e-14);
        assert_eq!(lens_area(5.0, 1.0), 0.0);
    }

    #[test]
    fn total_overlap_examples() {
        let inst = PackingInstance::new(ball2(20.0), 1, 1.0).unwrap();
        let l = Layout::new(inst, vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(l.total_overlap(OverlapMeasure::Length), 0.0);

        let inst = PackingInstance::new(ball2(20.0), 2, 1.0).unwrap();
        let l = Layout::new(inst, vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(l.total_overlap(OverlapMeasure::Length), 2.0);
        assert_abs_diff_eq!(l.total_overlap(OverlapMeasure::AreaOrVolume), PI, epsilon = 1e-14);

        let inst = PackingInstance::new(ball2(20.0), 3, 0.5).unwrap();
        let l = Layout::new(inst, vec![vec![0.0, 0.0], vec![0.8, 0.0], vec![10.0, 10.0]]).unwrap();
        assert_abs_diff_eq!(l.total_overlap(OverlapMeasure::Length), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn instance_validation() {
        assert!(Container::ball(4, 1.0).is_err());
        assert!(Container::ball(2, 0.0).is_err());
        assert!(PackingInstance::new(ball2(1.0), 0, 0.5).is_err());
        assert!(PackingInstance::new(ball2(1.0), 2, 1.5).is_err());
        let b = Container::cube(3, 1.0).unwrap();
        assert!(PackingInstance::new(b, 2, 0.5).is_ok());
        assert!(PackingInstance::new(b, 2, 0.51).is_err());
    }

    #[test]
    fn layout_rejects_infeasible_center() {
        let inst = PackingInstance::new(ball2(1.0), 1, 0.25).unwrap();
        assert!(Layout::new(inst, vec![vec![0.75 + 1e-10, 0.0]]).is_ok());
        assert!(Layout::new(inst, vec![vec![0.76, 0.0]]).is_err());
        assert!(Layout::new(inst, vec![vec![0.1, 0.0, 0.0]]).is_err());
        assert!(Layout::new(inst, vec![]).is_err());
    }

    #[test]
    fn mutual_triple_detection() {
        let inst = PackingInstance::new(ball2(5.0), 3, 1.0).unwrap();
        let l = Layout::new(inst, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(l.has_mutual_triple());
        let l = Layout::new(inst, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]]).unwrap();
        assert!(!l.has_mutual_triple());
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0f64..3.0, dim)
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_nonexpansive(
            p in arb_point(3),
            q in arb_point(3),
            boxed in any::<bool>(),
            r in 0.05f64..0.45,
        ) {
            let c = if boxed { Container::cube(3, 1.0).unwrap() } else { Container::ball(3, 1.0).unwrap() };
            let pp = project_center(&p, &c, r);
            prop_assert!(c.is_feasible_center(&pp, r));
            let ppp = project_center(&pp, &c, r);
            for (a, b) in pp.iter().zip(&ppp) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
            // Any feasible point is at least as close to the projection as to the original.
            let f = project_center(&q, &c, r);
            prop_assert!(distance(&pp, &f) <= distance(&p, &f) + 1e-12);
        }

        #[test]
        fn overlap_length_symmetric_and_zero_iff_apart(
            a in arb_point(2),
            b in arb_point(2),
            r in 0.01f64..2.0,
        ) {
            let e = overlap_length(&a, &b, r);
            prop_assert_eq!(e, overlap_length(&b, &a, r));
            prop_assert_eq!(e == 0.0, distance(&a, &b) >= 2.0 * r);
        }

        #[test]
        fn lens_measures_monotone(d1 in 0.0f64..2.0, d2 in 0.0f64..2.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(lens_area(lo, 1.0) >= lens_area(hi, 1.0));
            prop_assert!(lens_volume(lo, 1.0) >= lens_volume(hi, 1.0));
        }
    }
}
