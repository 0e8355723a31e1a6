//! Packing identical circles and spheres in a circle, square, sphere or cube.
//!
//! The main method trains an encoder-perturbation-decoder network whose
//! encoder emits one center per object and whose decoder must identify each
//! object from its randomly perturbed center ([`packer`]). A projected
//! gradient descent on the pairwise overlap ([`baseline`]) serves as the
//! comparison method, and [`geometry`] and [`metrics`] provide the overlap
//! measures and Monte Carlo packing densities both are judged by.
//!
//! - [`geometry`]: containers, projection, overlap length/area/volume, Monte Carlo density
//! - [`nn`]: dense layers, activations, backpropagation, cross-entropy, Adam
//! - [`packer`]: the encoder-decoder model, perturbation sampler and training loop
//! - [`baseline`]: projected gradient descent with random restarts
//! - [`metrics`]: density reports, reference table, comparisons, traces
//! - [`render`]: SVG output
//! - [`cli`]: the `circlepack` command line

pub mod baseline;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod nn;
pub mod packer;
pub mod record;
pub mod render;

pub use baseline::{baseline_pack, BaselineConfig};
pub use error::{Error, Result};
pub use geometry::{Container, ContainerKind, Layout, OverlapMeasure, PackingInstance};
pub use metrics::{compare, density_report, DensityReport, ReferenceTable};
pub use packer::{train, PerturbationSpec, TrainConfig, Trainer};
pub use record::{RunRecord, TraceRow};
