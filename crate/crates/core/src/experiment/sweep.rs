use serde::Serialize;

use super::config::{SweepAxis, SweepSpec};
use super::parallel::{map_ordered, Execution};
use super::scenario::{simulate_point, PointCouplings, ResolvedScenario};
use crate::dynamics::NoiseParams;
use crate::error::Result;

/// F1 matrix: `f1[row][col]` is axis value `row` and family member `col`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub values: Vec<f64>,
    /// The rate held fixed while the other one is swept.
    pub fixed_rate: f64,
    pub f1: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn axis_label(&self) -> &'static str {
        match self.spec.axis {
            SweepAxis::Eta1 => "eta1_per_ns",
            SweepAxis::Eta2 => "eta2_per_ns",
        }
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.f1.iter().map(|row| row[col]).collect()
    }
}

/// Noise for one sweep point; the non-swept rate comes from the scenario.
pub fn sweep_noise(base: &ResolvedScenario, axis: SweepAxis, value: f64) -> Result<NoiseParams> {
    let (eta1, eta2) = (base.noise.eta1(), base.noise.eta2());
    match axis {
        SweepAxis::Eta1 => NoiseParams::from_rates(value, eta2),
        SweepAxis::Eta2 => NoiseParams::from_rates(eta1, value),
    }
}

/// Couplings for family ratio r: g′ = r·g, E and g unchanged.
pub fn sweep_couplings(base: &ResolvedScenario, ratio: f64) -> PointCouplings {
    PointCouplings {
        g: base.couplings.g,
        g_prime: ratio * base.couplings.g,
        energy_e: base.couplings.energy_e,
    }
}

pub fn run_sweep(base: &ResolvedScenario, spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(base, spec, Execution::default())
}

pub fn run_sweep_with(
    base: &ResolvedScenario,
    spec: &SweepSpec,
    exec: Execution,
) -> Result<SweepResult> {
    let values = spec.values();
    let cols = spec.family.len();
    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .collect();
    let results = map_ordered(&jobs, exec, |&(r, c)| {
        let noise = sweep_noise(base, spec.axis, values[r])?;
        simulate_point(base, sweep_couplings(base, spec.family[c]), &noise, None).map(|(f, _)| f)
    });
    let flat = results.into_iter().collect::<Result<Vec<f64>>>()?;
    let f1 = flat.chunks(cols).map(<[f64]>::to_vec).collect();
    let fixed_rate = match spec.axis {
        SweepAxis::Eta1 => base.noise.eta2(),
        SweepAxis::Eta2 => base.noise.eta1(),
    };
    Ok(SweepResult {
        spec: spec.clone(),
        values,
        fixed_rate,
        f1,
    })
}
