use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::parallel::{map_ordered, Execution};
use super::scenario::{simulate_point, PointCouplings, ResolvedScenario};
use crate::error::{Error, Result};

/// Multiplicative factors on (E, g, g′).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Perturbation {
    pub energy_e: f64,
    pub g: f64,
    pub g_prime: f64,
}

impl Perturbation {
    fn apply(&self, base: &ResolvedScenario) -> PointCouplings {
        PointCouplings {
            g: base.couplings.g * self.g,
            g_prime: base.couplings.g_prime * self.g_prime,
            energy_e: base.couplings.energy_e * self.energy_e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Corner {
    pub factors: Perturbation,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RobustnessSummary {
    pub schema_version: u32,
    pub error_fraction: f64,
    pub samples: usize,
    pub seed: u64,
    pub nominal_f1: f64,
    pub min_f1: f64,
    pub mean_f1: f64,
    pub max_f1: f64,
    pub corners: Vec<Corner>,
    pub worst_corner: Corner,
}

/// Draws every factor triple up front so results do not depend on
/// evaluation order.
pub fn draw_perturbations(error_fraction: f64, samples: usize, seed: u64) -> Vec<Perturbation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new_inclusive(1.0 - error_fraction, 1.0 + error_fraction);
    (0..samples)
        .map(|_| Perturbation {
            energy_e: u.sample(&mut rng),
            g: u.sample(&mut rng),
            g_prime: u.sample(&mut rng),
        })
        .collect()
}

/// The 8 sign combinations at ±f, E varying slowest.
pub fn corners(error_fraction: f64) -> Vec<Perturbation> {
    let s = [1.0 - error_fraction, 1.0 + error_fraction];
    let mut out = Vec::with_capacity(8);
    for e in s {
        for g in s {
            for gp in s {
                out.push(Perturbation {
                    energy_e: e,
                    g,
                    g_prime: gp,
                });
            }
        }
    }
    out
}

pub fn run_robustness(
    base: &ResolvedScenario,
    error_fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<RobustnessSummary> {
    run_robustness_with(base, error_fraction, samples, seed, Execution::default())
}

pub fn run_robustness_with(
    base: &ResolvedScenario,
    error_fraction: f64,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<RobustnessSummary> {
    if !(0.0..=0.5).contains(&error_fraction) {
        return Err(Error::InvalidParams(format!(
            "error fraction {error_fraction} outside [0, 0.5]"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let eval = |p: &Perturbation| -> Result<f64> {
        simulate_point(base, p.apply(base), &base.noise, None).map(|(f, _)| f)
    };
    let nominal = Perturbation {
        energy_e: 1.0,
        g: 1.0,
        g_prime: 1.0,
    };

    let draws = draw_perturbations(error_fraction, samples, seed);
    let corner_set = corners(error_fraction);
    let mut all = vec![nominal];
    all.extend_from_slice(&corner_set);
    all.extend_from_slice(&draws);
    let f = map_ordered(&all, exec, eval)
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let nominal_f1 = f[0];
    let corners: Vec<Corner> = corner_set
        .iter()
        .zip(&f[1..9])
        .map(|(&factors, &f1)| Corner { factors, f1 })
        .collect();
    let worst_corner = *corners
        .iter()
        .min_by(|a, b| a.f1.total_cmp(&b.f1))
        .expect("8 corners");
    let mc = &f[9..];
    Ok(RobustnessSummary {
        schema_version: super::config::SCHEMA_VERSION,
        error_fraction,
        samples,
        seed,
        nominal_f1,
        min_f1: mc.iter().copied().fold(f64::INFINITY, f64::min),
        mean_f1: mc.iter().sum::<f64>() / mc.len() as f64,
        max_f1: mc.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        corners,
        worst_corner,
    })
}
