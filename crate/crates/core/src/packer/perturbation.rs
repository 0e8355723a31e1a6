use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_in_ball, Point};

/// One draw of `W = r · Z^p · V/‖V‖₂`; always `‖W‖₂ ≤ r`.
pub fn sample_perturbation<R: Rng + ?Sized>(r: f64, p: f64, dim: usize, rng: &mut R) -> Point {
    sample_in_ball(r, p, dim, rng)
}

/// Perturbation radius plus a piecewise-constant schedule for the radial
/// exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub radius: f64,
    /// `(start_epoch, p)`, strictly increasing, first entry at epoch 0.
    pub schedule: Vec<(usize, f64)>,
}

impl PerturbationSpec {
    pub fn new(radius: f64, schedule: Vec<(usize, f64)>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("perturbation radius must be positive, got {radius}")));
        }
        match schedule.first() {
            None => return Err(Error::InvalidArgument("empty p schedule".into())),
            Some((start, _)) if *start != 0 => {
                return Err(Error::InvalidArgument("p schedule must start at epoch 0".into()))
            }
            _ => {}
        }
        if schedule.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("p schedule epochs must be strictly increasing".into()));
        }
        if let Some((_, p)) = schedule.iter().find(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument(format!("p must be finite and non-negative, got {p}")));
        }
        Ok(Self { radius, schedule })
    }

    /// Constant `p` for the whole run.
    pub fn fixed(radius: f64, p: f64) -> Result<Self> {
        Self::new(radius, vec![(0, p)])
    }

    /// `p = 2` for the first half of `epochs`, then `p = 1/5`.
    pub fn two_phase(radius: f64, epochs: usize) -> Result<Self> {
        let switch = (epochs / 2).max(1);
        Self::new(radius, vec![(0, 2.0), (switch, 0.2)])
    }

    /// Parses `"0:2,10000:0.2"`.
    pub fn parse_schedule(text: &str) -> Result<Vec<(usize, f64)>> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|entry| {
                let (e, p) = entry
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("schedule entry `{entry}` is not epoch:p")))?;
                let epoch = e.trim().parse().map_err(|_| Error::Parse(format!("bad epoch `{e}`")))?;
                let p = parse_exponent(p.trim())?;
                Ok((epoch, p))
            })
            .collect()
    }

    pub fn scheduled_p(&self, epoch: usize) -> f64 {
        scheduled_p(self, epoch)
    }

    pub fn describe(&self) -> String {
        self.schedule.iter().map(|(e, p)| format!("{e}:{p}")).collect::<Vec<_>>().join(",")
    }
}

/// Accepts decimals and simple fractions like `1/5`.
fn parse_exponent(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("bad exponent `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

/// `p` of the last schedule entry starting at or before `epoch`.
pub fn scheduled_p(pspec: &PerturbationSpec, epoch: usize) -> f64 {
    pspec
        .schedule
        .iter()
        .take_while(|(start, _)| *start <= epoch)
        .last()
        .map(|&(_, p)| p)
        .expect("validated schedule starts at epoch 0")
}
