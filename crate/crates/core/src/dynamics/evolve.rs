use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::lindblad::{Lindbladian, NoiseParams, SystemOperators};
use super::pulse::{PulseSchedule, PulseSegment};
use crate::device::DerivedCouplings;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HilbertSpec, Operator, Spin, C64};

/// Fixed-step samples per period of the fastest phase factor, by default.
const DEFAULT_POINTS_PER_PERIOD: f64 = 200.0;
/// Hard floor on phase resolution; coarser steps are rejected.
const MIN_POINTS_PER_PERIOD: f64 = 100.0;
const DEFAULT_STEPS_PER_SCHEDULE: f64 = 1e4;
/// Trace drift beyond which a run is reported as failed.
pub const TRACE_FAILURE: f64 = 1e-6;

/// Something that yields H(t) on the composite space.
trait Drive {
    fn fill(&self, t: f64, out: &mut DMatrix<C64>);
}

/// Interaction-picture H_I for one segment, with the operator pieces
/// pre-scaled by the peak couplings.
struct InteractionDrive {
    jc: DMatrix<C64>,
    non_jc: DMatrix<C64>,
    non_jc_dag: DMatrix<C64>,
    segment: PulseSegment,
    start: f64,
}

impl InteractionDrive {
    fn new(ops: &SystemOperators, segment: &PulseSegment, start: f64) -> Self {
        let jc = ops.jc.matrix() * C64::new(-0.5 * segment.g, 0.0);
        let non_jc = ops.flux_z_sigma_plus.matrix() * C64::new(-0.5 * segment.g_prime, 0.0);
        let non_jc_dag = non_jc.adjoint();
        Self {
            jc,
            non_jc,
            non_jc_dag,
            segment: *segment,
            start,
        }
    }
}

impl Drive for InteractionDrive {
    fn fill(&self, t: f64, out: &mut DMatrix<C64>) {
        let s = self
            .segment
            .shape
            .envelope(t - self.start, self.segment.duration);
        let phase = C64::from_polar(s, self.segment.phase_freq * t);
        out.copy_from(&self.jc);
        *out *= C64::new(s, 0.0);
        out.zip_zip_apply(&self.non_jc, &self.non_jc_dag, |h, p, q| {
            *h += p * phase + q * phase.conj()
        });
    }
}

struct StaticDrive(DMatrix<C64>);

impl Drive for StaticDrive {
    fn fill(&self, _t: f64, out: &mut DMatrix<C64>) {
        out.copy_from(&self.0);
    }
}

/// H_I(t) = −½g(t)(a†σ_t^− + aσ_t^+) − ½g′(t)σ_f^z(σ_t^+ e^{iEt} + σ_t^− e^{−iEt}).
///
/// `t` is schedule time (it sets the phase); `segment_start` positions the
/// envelope.
pub fn build_interaction_hamiltonian(
    t: f64,
    segment_start: f64,
    segment: &PulseSegment,
    spec: &HilbertSpec,
) -> Operator {
    let ops = SystemOperators::new(*spec);
    let drive = InteractionDrive::new(&ops, segment, segment_start);
    let mut h = DMatrix::zeros(spec.dim(), spec.dim());
    drive.fill(t, &mut h);
    Operator::from_matrix(h)
}

/// Static lab-frame Hamiltonian in the rotated topological basis:
/// ω_f a†a + ½E(|↑⟩⟨↑| − |↓⟩⟨↓|) − ½g′ σ_f^z σ_t^x − ½g (a + a†) σ_t^x.
pub fn build_lab_hamiltonian(c: &DerivedCouplings, spec: &HilbertSpec) -> Operator {
    let ops = SystemOperators::new(*spec);
    let r = |x: f64| C64::new(x, 0.0);
    let free = &ops.number.scale(r(c.omega_f)) + &ops.spin_z.scale(r(0.5 * c.energy_e));
    let non_jc = (&ops.flux_z * &ops.spin_x).scale(r(-0.5 * c.g_prime));
    let jc = (&(&ops.a + &ops.a_dag) * &ops.spin_x).scale(r(-0.5 * c.g));
    &(&free + &non_jc) + &jc
}

/// Sampled density-matrix elements and diagnostics.
///
/// ρ11 = ⟨↓1|ρ|↓1⟩, ρ22 = ⟨↑0|ρ|↑0⟩, ρ12 = ⟨↓1|ρ|↑0⟩, ρ21 = ⟨↑0|ρ|↓1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub rho11: Vec<C64>,
    pub rho22: Vec<C64>,
    pub rho12: Vec<C64>,
    pub rho21: Vec<C64>,
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub final_state: DensityMatrix,
    pub max_hermiticity_error: f64,
    /// Steps actually taken, and the largest step used.
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    fn new(dim: usize) -> Self {
        Self {
            times: Vec::new(),
            rho11: Vec::new(),
            rho22: Vec::new(),
            rho12: Vec::new(),
            rho21: Vec::new(),
            trace: Vec::new(),
            purity: Vec::new(),
            min_eigenvalue: Vec::new(),
            final_state: DensityMatrix::from_matrix_unchecked(DMatrix::zeros(dim, dim)),
            max_hermiticity_error: 0.0,
            steps: 0,
            dt: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace
            .iter()
            .map(|t| (t - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue_overall(&self) -> f64 {
        self.min_eigenvalue
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    fn record(&mut self, t: f64, rho: &DMatrix<C64>, spec: &HilbertSpec) {
        let d1 = spec.index(Spin::Down, 1);
        let u0 = spec.index(Spin::Up, 0);
        let state = DensityMatrix::from_matrix_unchecked(rho.clone());
        self.times.push(t);
        self.rho11.push(rho[(d1, d1)]);
        self.rho22.push(rho[(u0, u0)]);
        self.rho12.push(rho[(d1, u0)]);
        self.rho21.push(rho[(u0, d1)]);
        self.trace.push(state.trace());
        self.purity.push(state.purity());
        self.min_eigenvalue.push(state.min_eigenvalue());
        self.max_hermiticity_error = self.max_hermiticity_error.max(state.hermiticity_error());
    }
}

/// Serialisable scalar summary of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrajectoryDiagnostics {
    pub samples: usize,
    pub steps: usize,
    pub dt: f64,
    pub final_trace: f64,
    pub max_trace_drift: f64,
    pub final_purity: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
}

impl From<&Trajectory> for TrajectoryDiagnostics {
    fn from(t: &Trajectory) -> Self {
        Self {
            samples: t.len(),
            steps: t.steps,
            dt: t.dt,
            final_trace: t.final_state.trace(),
            max_trace_drift: t.max_trace_drift(),
            final_purity: t.final_state.purity(),
            min_eigenvalue: t.min_eigenvalue_overall(),
            max_hermiticity_error: t.max_hermiticity_error,
        }
    }
}

/// Default step: min(total/10⁴, (2π/E)/200) over segments with E ≠ 0.
pub fn default_dt(schedule: &PulseSchedule) -> f64 {
    schedule
        .segments
        .iter()
        .filter(|s| s.phase_freq != 0.0)
        .map(|s| 2.0 * PI / s.phase_freq.abs() / DEFAULT_POINTS_PER_PERIOD)
        .fold(
            schedule.total_duration() / DEFAULT_STEPS_PER_SCHEDULE,
            f64::min,
        )
}

fn check_step(schedule: &PulseSchedule, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepSize { dt, max: f64::NAN });
    }
    for seg in &schedule.segments {
        if seg.phase_freq != 0.0 {
            let max = 2.0 * PI / seg.phase_freq.abs() / MIN_POINTS_PER_PERIOD;
            if dt > max * (1.0 + 1e-12) {
                return Err(Error::StepSize { dt, max });
            }
        }
    }
    Ok(())
}

struct Workspace {
    h: DMatrix<C64>,
    tmp: DMatrix<C64>,
    scratch: DMatrix<C64>,
    k: [DMatrix<C64>; 4],
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || DMatrix::zeros(dim, dim);
        Self {
            h: z(),
            tmp: z(),
            scratch: z(),
            k: [z(), z(), z(), z()],
        }
    }
}

fn rk4_step(
    lind: &Lindbladian,
    drive: &dyn Drive,
    ws: &mut Workspace,
    rho: &mut DMatrix<C64>,
    t: f64,
    dt: f64,
) {
    let Workspace { h, tmp, scratch, k } = ws;
    let [k1, k2, k3, k4] = k;
    let half = C64::new(0.5 * dt, 0.0);
    drive.fill(t, h);
    lind.rhs_into(h, rho, k1, scratch);
    drive.fill(t + 0.5 * dt, h);
    tmp.zip_zip_apply(rho, k1, |x, r, k| *x = r + k * half);
    lind.rhs_into(h, tmp, k2, scratch);
    tmp.zip_zip_apply(rho, k2, |x, r, k| *x = r + k * half);
    lind.rhs_into(h, tmp, k3, scratch);
    drive.fill(t + dt, h);
    tmp.zip_zip_apply(rho, k3, |x, r, k| *x = r + k * C64::new(dt, 0.0));
    lind.rhs_into(h, tmp, k4, scratch);
    let sixth = dt / 6.0;
    let third = dt / 3.0;
    rho.zip_zip_apply(k1, k4, |r, a, d| *r += (a + d) * sixth);
    rho.zip_zip_apply(k2, k3, |r, b, c| *r += (b + c) * third);
}

/// Integrates ρ through consecutive `(start, duration, drive)` pieces,
/// calling `observe(t, ρ)` at t = 0, every `sample_period` and at the end.
fn integrate(
    m0: DMatrix<C64>,
    lind: &Lindbladian,
    pieces: &[(f64, f64, &dyn Drive)],
    dt: f64,
    sample_period: Option<f64>,
    mut observe: impl FnMut(f64, &DMatrix<C64>),
) -> (DMatrix<C64>, usize, f64) {
    let dim = m0.nrows();
    let mut rho = m0;
    let mut ws = Workspace::new(dim);
    let mut steps = 0;
    let mut max_step: f64 = 0.0;
    let mut next_sample = sample_period.unwrap_or(f64::INFINITY);
    observe(0.0, &rho);
    let mut last_observed = 0.0;
    let mut t = 0.0;
    for &(start, duration, drive) in pieces {
        let n = ((duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        max_step = max_step.max(h);
        for k in 0..n {
            let t0 = start + k as f64 * h;
            rk4_step(lind, drive, &mut ws, &mut rho, t0, h);
            steps += 1;
            t = start + (k + 1) as f64 * h;
            if let Some(period) = sample_period {
                if t >= next_sample - 1e-9 * h {
                    observe(t, &rho);
                    last_observed = t;
                    while next_sample <= t + 1e-9 * h {
                        next_sample += period;
                    }
                }
            }
        }
    }
    if last_observed != t {
        observe(t, &rho);
    }
    (rho, steps, max_step)
}

fn spec_for(dim: usize) -> Result<HilbertSpec> {
    if !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            got: dim,
        });
    }
    HilbertSpec::new(dim / 2)
}

fn finish(mut traj: Trajectory, rho: DMatrix<C64>, steps: usize, dt: f64) -> Result<Trajectory> {
    traj.final_state = DensityMatrix::from_matrix_unchecked(rho);
    traj.steps = steps;
    traj.dt = dt;
    let drift = traj.max_trace_drift();
    if !(drift <= TRACE_FAILURE) {
        return Err(Error::IntegrationFailure(format!(
            "trace drift {drift:e} exceeds {TRACE_FAILURE:e}"
        )));
    }
    Ok(traj)
}

/// Fixed-step RK4 integration of the master equation under H_I(t).
pub fn evolve(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    noise: &NoiseParams,
    dt: f64,
) -> Result<Trajectory> {
    schedule.validate()?;
    noise.validate()?;
    check_step(schedule, dt)?;
    let spec = spec_for(rho0.dim())?;
    let ops = SystemOperators::new(spec);
    let lind = Lindbladian::new(&ops, noise);
    let drives: Vec<InteractionDrive> = schedule
        .segments
        .iter()
        .zip(schedule.starts())
        .map(|(seg, start)| InteractionDrive::new(&ops, seg, start))
        .collect();
    let pieces: Vec<(f64, f64, &dyn Drive)> = drives
        .iter()
        .map(|d| (d.start, d.segment.duration, d as &dyn Drive))
        .collect();

    let mut traj = Trajectory::new(spec.dim());
    let (rho, steps, h) = integrate(
        rho0.matrix().clone(),
        &lind,
        &pieces,
        dt,
        Some(schedule.sample_period),
        |t, m| traj.record(t, m, &spec),
    );
    finish(traj, rho, steps, h)
}

/// Lab-frame evolution under the static Hamiltonian, for RWA cross-checks.
pub fn evolve_lab(
    rho0: &DensityMatrix,
    couplings: &DerivedCouplings,
    duration: f64,
    noise: &NoiseParams,
    dt: f64,
    sample_period: f64,
) -> Result<Trajectory> {
    noise.validate()?;
    let spec = spec_for(rho0.dim())?;
    let fastest = couplings.omega_f.abs() + couplings.energy_e.abs();
    let max = 2.0 * PI / fastest / MIN_POINTS_PER_PERIOD;
    if !(dt > 0.0) || dt > max {
        return Err(Error::StepSize { dt, max });
    }
    let ops = SystemOperators::new(spec);
    let lind = Lindbladian::new(&ops, noise);
    let drive = StaticDrive(build_lab_hamiltonian(couplings, &spec).into_matrix());
    let mut traj = Trajectory::new(spec.dim());
    let (rho, steps, h) = integrate(
        rho0.matrix().clone(),
        &lind,
        &[(0.0, duration, &drive)],
        dt,
        Some(sample_period),
        |t, m| traj.record(t, m, &spec),
    );
    finish(traj, rho, steps, h)
}

/// Propagates an arbitrary (not necessarily physical) matrix through the
/// same generator; the map is linear, so noise-free runs on |i⟩⟨j| give
/// U|i⟩⟨j|U†.
pub fn propagate_matrix(
    m0: &DMatrix<C64>,
    schedule: &PulseSchedule,
    noise: &NoiseParams,
    dt: f64,
) -> Result<DMatrix<C64>> {
    schedule.validate()?;
    check_step(schedule, dt)?;
    let spec = spec_for(m0.nrows())?;
    let ops = SystemOperators::new(spec);
    let lind = Lindbladian::new(&ops, noise);
    let drives: Vec<InteractionDrive> = schedule
        .segments
        .iter()
        .zip(schedule.starts())
        .map(|(seg, start)| InteractionDrive::new(&ops, seg, start))
        .collect();
    let pieces: Vec<(f64, f64, &dyn Drive)> = drives
        .iter()
        .map(|d| (d.start, d.segment.duration, d as &dyn Drive))
        .collect();
    let (m, _, _) = integrate(m0.clone(), &lind, &pieces, dt, None, |_, _| {});
    Ok(m)
}
