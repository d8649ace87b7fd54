use serde::Serialize;

use super::config::{Experiment, ScenarioConfig};
use crate::device::{self, DerivedCouplings, DeviceParams, ValidityReport};
use crate::dynamics::{
    default_dt, evolve, pulse_duration_for_area, NoiseParams, PulseSchedule, PulseSegment,
    PulseShape, Trajectory, TrajectoryDiagnostics,
};
use crate::error::Result;
use crate::hilbert::{fidelity_pure, DensityMatrix, HilbertSpec, Spin, StateVector, C64};
use crate::units::{ghz_to_rad_per_ns, rad_per_ns_to_ghz};

/// Config after unit conversion, φ_c resolution and override application.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub experiment: Experiment,
    pub device: DeviceParams,
    pub couplings: DerivedCouplings,
    /// `None` when overrides bypass a pipeline that cannot be evaluated.
    pub validity: Option<ValidityReport>,
    pub overrides_applied: bool,
    pub spec: HilbertSpec,
    pub noise: NoiseParams,
    pub area: f64,
    pub shape: PulseShape,
    pub dt: Option<f64>,
    pub sample_period: f64,
}

impl ResolvedScenario {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let mut p = cfg.device_params();
        let noise = cfg.noise.params();
        noise.validate()?;

        let pipeline = || -> Result<(DeviceParams, DerivedCouplings, ValidityReport)> {
            let mut p = p;
            if p.phi_c.is_nan() {
                let statics = device::derive_statics(&p)?;
                let target = cfg
                    .device
                    .resonance_ghz
                    .map(ghz_to_rad_per_ns)
                    .unwrap_or(statics.omega_f);
                p.phi_c = device::solve_resonant_phase(&p, target)?;
            }
            let c = device::derive(&p)?;
            let v = device::validity_report(&p, p.phi_c)?;
            Ok((p, c, v))
        };

        let ov = cfg.overrides;
        let (couplings, validity) = if ov.is_complete() {
            match pipeline() {
                Ok((resolved, c, v)) => {
                    p = resolved;
                    (c, Some(v))
                }
                Err(_) => {
                    let s = device::derive_statics(&p)?;
                    let c = DerivedCouplings {
                        theta: s.theta,
                        zeta: s.zeta,
                        omega_f: s.omega_f,
                        lambda_phi: f64::NAN,
                        energy_e: f64::NAN,
                        de_dphi: f64::NAN,
                        g: f64::NAN,
                        g_prime: f64::NAN,
                    };
                    (c, None)
                }
            }
        } else {
            let (resolved, c, v) = pipeline()?;
            p = resolved;
            (c, Some(v))
        };

        let couplings = DerivedCouplings {
            g: ov.g_ghz.map(ghz_to_rad_per_ns).unwrap_or(couplings.g),
            g_prime: ov
                .g_prime_ghz
                .map(ghz_to_rad_per_ns)
                .unwrap_or(couplings.g_prime),
            energy_e: ov
                .e_ghz
                .map(ghz_to_rad_per_ns)
                .unwrap_or(couplings.energy_e),
            ..couplings
        };

        Ok(Self {
            experiment: cfg.experiment.clone(),
            device: p,
            couplings,
            validity,
            overrides_applied: !ov.is_empty(),
            spec: HilbertSpec::new(cfg.hilbert.fock_levels)?,
            noise,
            area: cfg.area(),
            shape: cfg.pulse.shape(),
            dt: cfg.integration.dt_ns,
            sample_period: cfg.integration.sample_period_ns,
        })
    }

    /// Pulse length realising the configured area with the nominal g.
    pub fn pulse_duration(&self) -> Result<f64> {
        pulse_duration_for_area(self.area, self.couplings.g, self.shape)
    }

    /// cos(A/2)|↑0⟩ + i·sin(A/2)|↓1⟩.
    pub fn target_state(&self) -> StateVector {
        let half = 0.5 * self.area;
        let mut amps = StateVector::basis(&self.spec, Spin::Up, 0)
            .amplitudes()
            .clone();
        amps[self.spec.index(Spin::Up, 0)] = C64::new(half.cos(), 0.0);
        amps[self.spec.index(Spin::Down, 1)] = C64::new(0.0, half.sin());
        StateVector::new(amps).expect("unit norm")
    }

    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::pure(&StateVector::basis(&self.spec, Spin::Up, 0))
    }
}

/// Couplings actually applied during one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCouplings {
    pub g: f64,
    pub g_prime: f64,
    pub energy_e: f64,
}

impl From<&DerivedCouplings> for PointCouplings {
    fn from(c: &DerivedCouplings) -> Self {
        Self {
            g: c.g,
            g_prime: c.g_prime,
            energy_e: c.energy_e,
        }
    }
}

/// One pulse from |↑0⟩. The duration always comes from the nominal g of
/// `base`, so perturbed couplings over- or under-rotate.
pub fn simulate_point(
    base: &ResolvedScenario,
    at: PointCouplings,
    noise: &NoiseParams,
    sample_period: Option<f64>,
) -> Result<(f64, Trajectory)> {
    let duration = base.pulse_duration()?;
    let segment = PulseSegment {
        duration,
        g: at.g,
        g_prime: at.g_prime,
        phase_freq: at.energy_e,
        shape: base.shape,
    };
    let schedule = PulseSchedule::single(segment, sample_period.unwrap_or(duration))?;
    let dt = base.dt.unwrap_or_else(|| default_dt(&schedule));
    let traj = evolve(&base.initial_state(), &schedule, noise, dt)?;
    let f = fidelity_pure(&base.target_state(), &traj.final_state)?;
    Ok((f, traj))
}

/// Resolved quantities in both internal units and GHz.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvedEcho {
    pub device: DeviceParams,
    pub couplings: DerivedCouplings,
    pub couplings_ghz: CouplingsGhz,
    pub validity: Option<ValidityReport>,
    pub overrides_applied: bool,
    pub fock_levels: usize,
    pub noise: NoiseParams,
    pub area_over_pi: f64,
    pub shape: PulseShape,
    pub pulse_duration_ns: f64,
    pub dt_ns: Option<f64>,
    pub sample_period_ns: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CouplingsGhz {
    pub omega_f: f64,
    pub energy_e: f64,
    pub g: f64,
    pub g_prime: f64,
}

impl ResolvedEcho {
    pub fn of(r: &ResolvedScenario) -> Result<Self> {
        Ok(Self {
            device: r.device,
            couplings: r.couplings,
            couplings_ghz: CouplingsGhz {
                omega_f: rad_per_ns_to_ghz(r.couplings.omega_f),
                energy_e: rad_per_ns_to_ghz(r.couplings.energy_e),
                g: rad_per_ns_to_ghz(r.couplings.g),
                g_prime: rad_per_ns_to_ghz(r.couplings.g_prime),
            },
            validity: r.validity.clone(),
            overrides_applied: r.overrides_applied,
            fock_levels: r.spec.fock_levels(),
            noise: r.noise,
            area_over_pi: r.area / std::f64::consts::PI,
            shape: r.shape,
            pulse_duration_ns: r.pulse_duration()?,
            dt_ns: r.dt,
            sample_period_ns: r.sample_period,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioSummary {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub fidelity_label: &'static str,
    pub fidelity: f64,
    pub diagnostics: TrajectoryDiagnostics,
    pub resolved: ResolvedEcho,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub summary: ScenarioSummary,
    pub trajectory: Trajectory,
}

/// Single pulse from |↑0⟩ with the configured couplings and noise.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let r = ResolvedScenario::from_config(cfg)?;
    run_resolved(&r)
}

pub fn run_resolved(r: &ResolvedScenario) -> Result<ScenarioOutcome> {
    let (fidelity, trajectory) = simulate_point(
        r,
        PointCouplings::from(&r.couplings),
        &r.noise,
        Some(r.sample_period),
    )?;
    let summary = ScenarioSummary {
        schema_version: super::config::SCHEMA_VERSION,
        experiment: r.experiment.name(),
        fidelity_label: r.experiment.fidelity_label(),
        fidelity,
        diagnostics: TrajectoryDiagnostics::from(&trajectory),
        resolved: ResolvedEcho::of(r)?,
    };
    Ok(ScenarioOutcome {
        summary,
        trajectory,
    })
}
