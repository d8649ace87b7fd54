//! On-disk scenario configuration (JSON, `schemaVersion: 1`).
//!
//! Frequencies are ordinary frequencies in GHz (ω/2π), times in ns, lengths
//! in μm, Fermi velocity in m/s and temperature in mK. Unknown keys are
//! rejected and every error carries a JSON-pointer path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::dynamics::{NoiseParams, PulseShape};
use crate::error::{Error, Result};
use crate::units::{ghz_to_rad_per_ns, millikelvin_to_rad_per_ns, mps_to_um_per_ns};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub device: DeviceConfig,
    #[serde(default)]
    pub hilbert: HilbertConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub overrides: Overrides,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DeviceConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "ejGHz")]
    pub ej_ghz: f64,
    pub ej_over_ec: f64,
    #[serde(rename = "delta0GHz")]
    pub delta0_ghz: f64,
    #[serde(rename = "vFMetersPerSecond")]
    pub v_f_mps: f64,
    pub length_um: f64,
    pub temperature_mk: f64,
    /// Controller setpoint in rad; solved from the resonance condition when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_c: Option<f64>,
    /// Resonance target E(φ_c)/2π; defaults to ω_f.
    #[serde(
        default,
        rename = "resonanceGHz",
        skip_serializing_if = "Option::is_none"
    )]
    pub resonance_ghz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HilbertConfig {
    pub fock_levels: usize,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        Self { fock_levels: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ShapeConfig {
    Rectangular,
    SinSquaredRamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PulseConfig {
    /// Pulse area ∫g dt in units of π; fixed by most experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_over_pi: Option<f64>,
    #[serde(default = "default_shape")]
    pub shape: ShapeConfig,
    #[serde(default)]
    pub ramp_time_ns: f64,
}

fn default_shape() -> ShapeConfig {
    ShapeConfig::Rectangular
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            area_over_pi: None,
            shape: ShapeConfig::Rectangular,
            ramp_time_ns: 0.0,
        }
    }
}

impl PulseConfig {
    pub fn shape(&self) -> PulseShape {
        match self.shape {
            ShapeConfig::Rectangular => PulseShape::Rectangular,
            ShapeConfig::SinSquaredRamp => PulseShape::SinSquaredRamp {
                ramp_time: self.ramp_time_ns,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NoiseConfig {
    pub tf1_ns: f64,
    pub tf2_ns: f64,
    #[serde(default = "yes")]
    pub enabled: bool,
}

fn yes() -> bool {
    true
}

impl NoiseConfig {
    pub fn params(&self) -> NoiseParams {
        if self.enabled {
            NoiseParams {
                tf1: self.tf1_ns,
                tf2: self.tf2_ns,
                enabled: true,
            }
        } else {
            NoiseParams::disabled()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IntegrationConfig {
    /// Fixed RK4 step; the default rule is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_ns: Option<f64>,
    #[serde(default = "default_sample_period")]
    pub sample_period_ns: f64,
}

fn default_sample_period() -> f64 {
    1e-3
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            dt_ns: None,
            sample_period_ns: default_sample_period(),
        }
    }
}

/// Explicit couplings that bypass the device pipeline (GHz).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, rename = "gGHz", skip_serializing_if = "Option::is_none")]
    pub g_ghz: Option<f64>,
    #[serde(default, rename = "gPrimeGHz", skip_serializing_if = "Option::is_none")]
    pub g_prime_ghz: Option<f64>,
    #[serde(default, rename = "eGHz", skip_serializing_if = "Option::is_none")]
    pub e_ghz: Option<f64>,
}

impl Overrides {
    pub fn is_complete(&self) -> bool {
        self.g_ghz.is_some() && self.g_prime_ghz.is_some() && self.e_ghz.is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.g_ghz.is_none() && self.g_prime_ghz.is_none() && self.e_ghz.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SweepAxis {
    /// η1 = 1/(2T_f1)
    Eta1,
    /// η2 = 1/T_f2
    Eta2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepConfig {
    /// Axis range in ns⁻¹; defaults bracket the operating point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default = "default_points")]
    pub points: usize,
    /// g′/g ratios, one output column each.
    #[serde(default = "default_family")]
    pub family: Vec<f64>,
}

fn default_points() -> usize {
    21
}

fn default_family() -> Vec<f64> {
    (0..=6).map(f64::from).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            range: None,
            points: default_points(),
            family: default_family(),
        }
    }
}

/// Resolved sweep: axis, range and g′/g family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub range: [f64; 2],
    pub points: usize,
    pub family: Vec<f64>,
}

impl SweepSpec {
    pub fn default_range(axis: SweepAxis) -> [f64; 2] {
        match axis {
            SweepAxis::Eta1 => [0.0, 0.01],
            SweepAxis::Eta2 => [0.0, 0.1],
        }
    }

    pub fn from_config(axis: SweepAxis, cfg: &SweepConfig) -> Result<Self> {
        let spec = Self {
            axis,
            range: cfg.range.unwrap_or_else(|| Self::default_range(axis)),
            points: cfg.points,
            family: cfg.family.clone(),
        };
        spec.validate(&format!("/experiment/{}", axis_key(axis)))?;
        Ok(spec)
    }

    fn validate(&self, at: &str) -> Result<()> {
        let [lo, hi] = self.range;
        if !(lo < hi) || lo < 0.0 || !hi.is_finite() {
            return Err(Error::config(
                format!("{at}/range"),
                format!("need 0 <= lo < hi, got [{lo}, {hi}]"),
            ));
        }
        if self.points < 2 {
            return Err(Error::config(
                format!("{at}/points"),
                "need at least 2 points",
            ));
        }
        if self.family.is_empty() {
            return Err(Error::config(
                format!("{at}/family"),
                "family must not be empty",
            ));
        }
        if let Some(i) = self.family.iter().position(|r| !r.is_finite()) {
            return Err(Error::config(
                format!("{at}/family/{i}"),
                "ratio must be finite",
            ));
        }
        Ok(())
    }

    /// Evenly spaced axis values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let [lo, hi] = self.range;
        let n = self.points;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

fn axis_key(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Eta1 => "fig3a",
        SweepAxis::Eta2 => "fig3b",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RobustnessConfig {
    #[serde(default = "default_error_fraction")]
    pub error_fraction: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_error_fraction() -> f64 {
    0.1
}

fn default_samples() -> usize {
    200
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        Self {
            error_fraction: default_error_fraction(),
            samples: default_samples(),
            seed: 0,
        }
    }
}

/// Exactly one experiment; unit variants are plain strings, the others
/// single-key objects, e.g. `{"fig3a": {"points": 11}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Experiment {
    /// State transfer |↑0⟩ → −i|↓1⟩ (area −π).
    Fig2a,
    /// Entangling pulse |↑0⟩ → (|↑0⟩ − i|↓1⟩)/√2 (area −π/2).
    Fig2b,
    /// F1 versus η1 for a g′/g family.
    Fig3a(SweepConfig),
    /// F1 versus η2 for a g′/g family.
    Fig3b(SweepConfig),
    Robustness(RobustnessConfig),
    /// State transfer with the second parameter set (g′ = 3g).
    AltParams,
    /// Arbitrary pulse area from `pulse.areaOverPi`.
    Custom,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig3a(_) => "fig3a",
            Experiment::Fig3b(_) => "fig3b",
            Experiment::Robustness(_) => "robustness",
            Experiment::AltParams => "altParams",
            Experiment::Custom => "custom",
        }
    }

    /// Pulse area fixed by the experiment, in units of π.
    pub fn fixed_area_over_pi(&self) -> Option<f64> {
        match self {
            Experiment::Fig2b => Some(-0.5),
            Experiment::Custom => None,
            _ => Some(-1.0),
        }
    }

    pub fn fidelity_label(&self) -> &'static str {
        match self {
            Experiment::Fig2b => "F2",
            Experiment::Custom => "F",
            _ => "F1",
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            Error::config(pointer, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Range checks beyond what the types enforce.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "/schemaVersion",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        let d = &self.device;
        if !(d.alpha > 0.5 && d.alpha < 1.0) {
            return Err(Error::config("/device/alpha", "must lie in (0.5, 1)"));
        }
        if !(d.beta >= 1.0) {
            return Err(Error::config("/device/beta", "must be >= 1"));
        }
        for (key, v) in [
            ("ejGHz", d.ej_ghz),
            ("ejOverEc", d.ej_over_ec),
            ("delta0GHz", d.delta0_ghz),
            ("vFMetersPerSecond", d.v_f_mps),
            ("lengthUm", d.length_um),
            ("temperatureMk", d.temperature_mk),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("/device/{key}"),
                    "must be a positive number",
                ));
            }
        }
        if let Some(phi) = d.phi_c {
            if !(phi > -2.0 * std::f64::consts::PI && phi < 2.0 * std::f64::consts::PI) {
                return Err(Error::config("/device/phiC", "must lie in (-2pi, 2pi)"));
            }
        }
        if let Some(w) = d.resonance_ghz {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("/device/resonanceGHz", "must be positive"));
            }
        }
        if !(2..=32).contains(&self.hilbert.fock_levels) {
            return Err(Error::config("/hilbert/fockLevels", "must lie in [2, 32]"));
        }
        if self.noise.enabled {
            if !(self.noise.tf1_ns > 0.0) {
                return Err(Error::config("/noise/tf1Ns", "must be > 0"));
            }
            if !(self.noise.tf2_ns > 0.0) {
                return Err(Error::config("/noise/tf2Ns", "must be > 0"));
            }
        }
        if let Some(dt) = self.integration.dt_ns {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config("/integration/dtNs", "must be > 0"));
            }
        }
        if !(self.integration.sample_period_ns > 0.0) {
            return Err(Error::config("/integration/samplePeriodNs", "must be > 0"));
        }
        if !(self.pulse.ramp_time_ns >= 0.0) {
            return Err(Error::config("/pulse/rampTimeNs", "must be >= 0"));
        }
        match (
            self.experiment.fixed_area_over_pi(),
            self.pulse.area_over_pi,
        ) {
            (None, None) => {
                return Err(Error::config(
                    "/pulse/areaOverPi",
                    "required by the custom experiment",
                ))
            }
            (Some(fixed), Some(given)) if given != fixed => {
                return Err(Error::config(
                    "/pulse/areaOverPi",
                    format!(
                        "experiment {} fixes the area at {fixed}·pi",
                        self.experiment.name()
                    ),
                ))
            }
            (None, Some(a)) if !a.is_finite() || a == 0.0 => {
                return Err(Error::config(
                    "/pulse/areaOverPi",
                    "must be finite and non-zero",
                ))
            }
            _ => {}
        }
        for (key, v) in [
            ("gGHz", self.overrides.g_ghz),
            ("gPrimeGHz", self.overrides.g_prime_ghz),
            ("eGHz", self.overrides.e_ghz),
        ] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(Error::config(format!("/overrides/{key}"), "must be finite"));
            }
        }
        match &self.experiment {
            Experiment::Fig3a(s) => {
                SweepSpec::from_config(SweepAxis::Eta1, s)?;
            }
            Experiment::Fig3b(s) => {
                SweepSpec::from_config(SweepAxis::Eta2, s)?;
            }
            Experiment::Robustness(r) => {
                if !(0.0..=0.5).contains(&r.error_fraction) {
                    return Err(Error::config(
                        "/experiment/robustness/errorFraction",
                        "must lie in [0, 0.5]",
                    ));
                }
                if r.samples == 0 {
                    return Err(Error::config(
                        "/experiment/robustness/samples",
                        "must be >= 1",
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        let over_pi = self
            .pulse
            .area_over_pi
            .or(self.experiment.fixed_area_over_pi())
            .expect("validated");
        over_pi * std::f64::consts::PI
    }

    /// Device parameters in internal units; φ_c is NaN until resolved.
    pub fn device_params(&self) -> DeviceParams {
        let d = &self.device;
        let noise = self.noise.params();
        DeviceParams {
            alpha: d.alpha,
            beta: d.beta,
            ej: ghz_to_rad_per_ns(d.ej_ghz),
            ej_over_ec: d.ej_over_ec,
            delta0: ghz_to_rad_per_ns(d.delta0_ghz),
            v_f: mps_to_um_per_ns(d.v_f_mps),
            length: d.length_um,
            phi_c: d.phi_c.unwrap_or(f64::NAN),
            tf1: noise.tf1,
            tf2: noise.tf2,
            temperature: millikelvin_to_rad_per_ns(d.temperature_mk),
        }
    }

    /// Set-1 Fig. 2a scenario; the other presets start from this.
    pub fn preset_set1(experiment: Experiment) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            device: DeviceConfig {
                alpha: 0.8,
                beta: 15.0,
                ej_ghz: 158.0,
                ej_over_ec: 80.0,
                delta0_ghz: 32.5,
                v_f_mps: 1e5,
                length_um: 5.0,
                temperature_mk: 20.0,
                phi_c: None,
                resonance_ghz: None,
            },
            hilbert: HilbertConfig::default(),
            pulse: PulseConfig::default(),
            noise: NoiseConfig {
                tf1_ns: 900.0,
                tf2_ns: 20.0,
                enabled: true,
            },
            integration: IntegrationConfig::default(),
            overrides: Overrides::default(),
            experiment,
        }
    }

    /// α = 0.97, β = 10, E_J/E_C = 30000, Δ0/2π = 78 GHz; ω_f kept at 50 GHz.
    pub fn preset_set2() -> Self {
        let mut cfg = Self::preset_set1(Experiment::AltParams);
        cfg.device.alpha = 0.97;
        cfg.device.beta = 10.0;
        cfg.device.ej_over_ec = 30_000.0;
        cfg.device.ej_ghz = 3061.862;
        cfg.device.delta0_ghz = 78.0;
        cfg
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer_of(text: &str) -> String {
        match ScenarioConfig::from_json(text) {
            Err(Error::Config { pointer, .. }) => pointer,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    fn base_json() -> serde_json::Value {
        serde_json::to_value(ScenarioConfig::preset_set1(Experiment::Fig2a)).unwrap()
    }

    #[test]
    fn preset_round_trips() {
        let cfg = ScenarioConfig::preset_set1(Experiment::Fig3a(SweepConfig::default()));
        let back = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_key_rejected_with_pointer() {
        let mut v = base_json();
        v["device"]["gamma"] = 1.0.into();
        let p = pointer_of(&v.to_string());
        assert!(p.starts_with("/device"), "{p}");
    }

    #[test]
    fn type_error_pointer() {
        let mut v = base_json();
        v["noise"]["tf1Ns"] = "long".into();
        assert_eq!(pointer_of(&v.to_string()), "/noise/tf1Ns");
    }

    #[test]
    fn range_error_pointer() {
        let mut v = base_json();
        v["device"]["alpha"] = 0.4.into();
        assert_eq!(pointer_of(&v.to_string()), "/device/alpha");
        let mut v = base_json();
        v["schemaVersion"] = 2.into();
        assert_eq!(pointer_of(&v.to_string()), "/schemaVersion");
    }

    #[test]
    fn exactly_one_experiment() {
        let mut v = base_json();
        v["experiment"] = serde_json::json!({"fig3a": {}, "fig3b": {}});
        assert!(pointer_of(&v.to_string()).starts_with("/experiment"));
        let mut v = base_json();
        v.as_object_mut().unwrap().remove("experiment");
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn area_rules() {
        let mut v = base_json();
        v["pulse"]["areaOverPi"] = (-0.5).into();
        assert_eq!(pointer_of(&v.to_string()), "/pulse/areaOverPi");
        let mut v = base_json();
        v["experiment"] = "custom".into();
        assert_eq!(pointer_of(&v.to_string()), "/pulse/areaOverPi");
        v["pulse"]["areaOverPi"] = (-1.5).into();
        let cfg = ScenarioConfig::from_json(&v.to_string()).unwrap();
        assert!((cfg.area() + 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn sweep_validation() {
        let mut v = base_json();
        v["experiment"] = serde_json::json!({"fig3b": {"range": [0.1, 0.0]}});
        assert_eq!(pointer_of(&v.to_string()), "/experiment/fig3b/range");
        v["experiment"] = serde_json::json!({"fig3a": {"points": 1}});
        assert_eq!(pointer_of(&v.to_string()), "/experiment/fig3a/points");
    }

    #[test]
    fn sweep_values() {
        let s = SweepSpec::from_config(SweepAxis::Eta1, &SweepConfig::default()).unwrap();
        let v = s.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.0);
        assert!((v[20] - 0.01).abs() < 1e-18);
    }

    #[test]
    fn unit_conversion() {
        let p = ScenarioConfig::preset_set1(Experiment::Fig2a).device_params();
        let q = DeviceParams::set1();
        assert!((p.ej - q.ej).abs() < 1e-12);
        assert!((p.v_f - 100.0).abs() < 1e-12);
        assert!((p.temperature - q.temperature).abs() < 1e-12);
        assert!(p.phi_c.is_nan());
    }
}
