//! Scenario configs, figure reproductions, sweeps, robustness runs and
//! output files.

pub mod config;
pub mod output;
pub mod parallel;
pub mod robustness;
pub mod scenario;
pub mod sweep;

pub use config::{
    Experiment, RobustnessConfig, ScenarioConfig, SweepAxis, SweepConfig, SweepSpec, SCHEMA_VERSION,
};
pub use output::{emit_outputs, OutputFormat, TRAJECTORY_COLUMNS};
pub use parallel::{map_ordered, Execution};
pub use robustness::{run_robustness, run_robustness_with, RobustnessSummary};
pub use scenario::{
    run_resolved, run_scenario, simulate_point, PointCouplings, ResolvedScenario, ScenarioOutcome,
    ScenarioSummary,
};
pub use sweep::{run_sweep, run_sweep_with, SweepResult};

/// Sweep spec selected by a fig3a/fig3b config.
pub fn sweep_spec(cfg: &ScenarioConfig) -> Option<crate::Result<SweepSpec>> {
    match &cfg.experiment {
        Experiment::Fig3a(s) => Some(SweepSpec::from_config(SweepAxis::Eta1, s)),
        Experiment::Fig3b(s) => Some(SweepSpec::from_config(SweepAxis::Eta2, s)),
        _ => None,
    }
}
