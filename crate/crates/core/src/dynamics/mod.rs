//! Time evolution of the hybrid system under pulse schedules.
//!
//! The master equation is integrated in the interaction picture with a
//! classical fixed-step RK4 scheme. No trace renormalisation is applied;
//! trace drift is reported and bounded instead.

mod evolve;
mod lindblad;
mod pulse;

pub use evolve::{
    build_interaction_hamiltonian, build_lab_hamiltonian, default_dt, evolve, evolve_lab,
    propagate_matrix, Trajectory, TrajectoryDiagnostics, TRACE_FAILURE,
};
pub use lindblad::{lindblad_rhs, Lindbladian, NoiseParams, SystemOperators};
pub use pulse::{pulse_duration_for_area, PulseSchedule, PulseSegment, PulseShape};
