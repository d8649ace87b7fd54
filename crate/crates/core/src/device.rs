//! Device-parameter pipeline: junction statics, the wire coupling law E(φ),
//! the JC and non-JC couplings g and g′, and a regime report.
//!
//! All angular frequencies are rad/ns, lengths μm, velocities μm/ns.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{ghz_to_rad_per_ns, millikelvin_to_rad_per_ns, mps_to_um_per_ns};

/// |Λ| beyond which the coupling law has a closed form.
pub const BRANCH_THRESHOLD: f64 = 5.0;
/// Slope of the strong-coupling law in units of v_F/L.
const STRONG_SLOPE: f64 = 1.9;
const STRONG_OFFSET: f64 = 0.5;
/// Regime check: E(φ_c)/g should be well above one.
pub const ENERGY_OVER_G_THRESHOLD: f64 = 10.0;
/// Regime check: |g/g′| at or above this suppresses the non-JC term.
pub const RATIO_THRESHOLD: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeviceParams {
    /// E_J3 / E_J, in (0.5, 1).
    pub alpha: f64,
    /// E_J4 / E_J, ≫ 1.
    pub beta: f64,
    pub ej: f64,
    pub ej_over_ec: f64,
    /// Proximity-induced gap Δ0.
    pub delta0: f64,
    pub v_f: f64,
    pub length: f64,
    /// Controller phase setpoint φ_c in rad.
    pub phi_c: f64,
    pub tf1: f64,
    pub tf2: f64,
    /// k_B·T/ħ.
    pub temperature: f64,
}

impl DeviceParams {
    /// α = 0.8, β = 15, E_J/E_C = 80, E_J/2π = 158 GHz, Δ0/2π = 32.5 GHz,
    /// v_F = 10⁵ m/s, L = 5 μm, T_f1 = 900 ns, T_f2 = 20 ns, 20 mK, φ_c = −1.73.
    pub fn set1() -> Self {
        Self {
            alpha: 0.8,
            beta: 15.0,
            ej: ghz_to_rad_per_ns(158.0),
            ej_over_ec: 80.0,
            delta0: ghz_to_rad_per_ns(32.5),
            v_f: mps_to_um_per_ns(1e5),
            length: 5.0,
            phi_c: -1.73,
            tf1: 900.0,
            tf2: 20.0,
            temperature: millikelvin_to_rad_per_ns(20.0),
        }
    }

    /// α = 0.97, β = 10, E_J/E_C = 30000, Δ0/2π = 78 GHz, with E_J chosen so
    /// ω_f/2π stays at 50 GHz; wire and noise as in [`DeviceParams::set1`].
    pub fn set2() -> Self {
        Self {
            alpha: 0.97,
            beta: 10.0,
            ej: ghz_to_rad_per_ns(3061.862),
            ej_over_ec: 30_000.0,
            delta0: ghz_to_rad_per_ns(78.0),
            phi_c: -0.646,
            ..Self::set1()
        }
    }

    pub fn ec(&self) -> f64 {
        self.ej / self.ej_over_ec
    }

    /// Δ0·L/v_F.
    pub fn wire_scale(&self) -> f64 {
        self.delta0 * self.length / self.v_f
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha = {} not in (0.5, 1)",
                self.alpha
            )));
        }
        if !(self.beta >= 1.0) {
            return Err(Error::InvalidParams(format!("beta = {} < 1", self.beta)));
        }
        let positive = [
            ("EJ", self.ej),
            ("EJ/EC", self.ej_over_ec),
            ("delta0", self.delta0),
            ("vF", self.v_f),
            ("L", self.length),
            ("Tf1", self.tf1),
            ("Tf2", self.tf2),
            ("temperature", self.temperature),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be > 0")));
            }
        }
        if !self.phi_c.is_finite() {
            return Err(Error::InvalidParams("phiC must be finite".into()));
        }
        Ok(())
    }

    /// Copy with φ_c set to the resonant phase for `omega_target`.
    pub fn at_resonance(mut self, omega_target: f64) -> Result<Self> {
        self.phi_c = solve_resonant_phase(&self, omega_target)?;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Statics {
    pub theta: f64,
    pub zeta: f64,
    pub omega_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivedCouplings {
    pub theta: f64,
    pub zeta: f64,
    pub omega_f: f64,
    pub lambda_phi: f64,
    pub energy_e: f64,
    pub de_dphi: f64,
    pub g: f64,
    pub g_prime: f64,
}

/// One named regime check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegimeFlag {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidityReport {
    pub ratio_g_over_g_prime: f64,
    pub energy_over_g: f64,
    /// Order-of-magnitude estimate, proportionality constant 1.
    pub tunneling_rate: f64,
    pub tunneling_error_prob: f64,
    pub thermal_occupation: f64,
    pub regime_flags: Vec<RegimeFlag>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.regime_flags.iter().all(|f| f.passed)
    }
}

/// θ, ζ and ω_f from the junction parameters.
pub fn derive_statics(p: &DeviceParams) -> Result<Statics> {
    let four_a2 = 4.0 * p.alpha * p.alpha;
    if four_a2 <= 1.0 {
        return Err(Error::Domain(format!("4·alpha² = {four_a2} <= 1")));
    }
    let theta = (four_a2 - 1.0).sqrt() / (2.0 * p.alpha * p.beta);
    let zeta = (8.0 / p.ej_over_ec).powf(0.25) / p.beta.sqrt();
    let omega_f = (8.0 * p.ej * p.ec()).sqrt();
    Ok(Statics {
        theta,
        zeta,
        omega_f,
    })
}

/// Λ(φ) = (Δ0·L/v_F)·sin(φ/2).
pub fn lambda_of_phi(p: &DeviceParams, phi: f64) -> f64 {
    p.wire_scale() * (phi / 2.0).sin()
}

/// Majorana hybridisation energy E(φ). Only the two closed-form branches
/// are supported; the gap between them is an error.
pub fn energy_of_phi(p: &DeviceParams, phi: f64) -> Result<f64> {
    let lambda = lambda_of_phi(p, phi);
    if lambda <= -BRANCH_THRESHOLD {
        Ok(-STRONG_SLOPE * (lambda - STRONG_OFFSET) * p.v_f / p.length)
    } else if lambda >= BRANCH_THRESHOLD {
        Ok(2.0 * p.delta0 * (phi / 2.0).sin() * (-lambda).exp())
    } else {
        Err(Error::OutsideValidity { phi, lambda })
    }
}

/// dE/dφ on the strong branch: −0.95·Δ0·cos(φ/2).
pub fn de_dphi(p: &DeviceParams, phi: f64) -> Result<f64> {
    let lambda = lambda_of_phi(p, phi);
    if lambda > -BRANCH_THRESHOLD {
        return Err(Error::OutsideValidity { phi, lambda });
    }
    Ok(-0.5 * STRONG_SLOPE * p.delta0 * (phi / 2.0).cos())
}

/// (g, g′) = (ζ/√2, θ)·dE/dφ at `phi_c`.
pub fn couplings_at(p: &DeviceParams, phi_c: f64) -> Result<(f64, f64)> {
    let s = derive_statics(p)?;
    let slope = de_dphi(p, phi_c)?;
    Ok((s.zeta * FRAC_1_SQRT_2 * slope, s.theta * slope))
}

/// The shorthand g ≈ −Δ0·(ζ/√2)·cos(φ/2), which drops the 0.95 factor.
/// Only a cross-check against [`couplings_at`].
pub fn g_shorthand(p: &DeviceParams, phi_c: f64) -> Result<f64> {
    let s = derive_statics(p)?;
    Ok(-p.delta0 * s.zeta * FRAC_1_SQRT_2 * (phi_c / 2.0).cos())
}

/// Phase in (−π, 0) on the strong branch with E(φ) = `omega_target`.
pub fn solve_resonant_phase(p: &DeviceParams, omega_target: f64) -> Result<f64> {
    let lambda = STRONG_OFFSET - omega_target * p.length / (STRONG_SLOPE * p.v_f);
    if lambda > -BRANCH_THRESHOLD {
        return Err(Error::OutsideValidity {
            phi: f64::NAN,
            lambda,
        });
    }
    let s = lambda / p.wire_scale();
    if s.abs() > 1.0 {
        return Err(Error::NoSolution(format!(
            "need sin(phi/2) = {s:.4}; the wire cannot reach Lambda = {lambda:.3} \
             (max |Lambda| = Delta0·L/vF = {:.3})",
            p.wire_scale()
        )));
    }
    let phi = 2.0 * s.asin();
    debug_assert!(phi > -PI - 1e-12 && phi < 0.0);
    Ok(phi)
}

/// g/g′ = √(2β)·α/√(4α²−1)·(8E_C/E_J)^{1/4}.
pub fn ratio_formula(p: &DeviceParams) -> Result<f64> {
    let four_a2 = 4.0 * p.alpha * p.alpha;
    if four_a2 <= 1.0 {
        return Err(Error::Domain(format!("4·alpha² = {four_a2} <= 1")));
    }
    Ok((2.0 * p.beta).sqrt() * p.alpha / (four_a2 - 1.0).sqrt() * (8.0 / p.ej_over_ec).powf(0.25))
}

/// Full pipeline at the configured φ_c.
pub fn derive(p: &DeviceParams) -> Result<DerivedCouplings> {
    p.validate()?;
    let s = derive_statics(p)?;
    let energy_e = energy_of_phi(p, p.phi_c)?;
    let slope = de_dphi(p, p.phi_c)?;
    Ok(DerivedCouplings {
        theta: s.theta,
        zeta: s.zeta,
        omega_f: s.omega_f,
        lambda_phi: lambda_of_phi(p, p.phi_c),
        energy_e,
        de_dphi: slope,
        g: s.zeta * FRAC_1_SQRT_2 * slope,
        g_prime: s.theta * slope,
    })
}

pub fn validity_report(p: &DeviceParams, phi_c: f64) -> Result<ValidityReport> {
    let s = derive_statics(p)?;
    let lambda = lambda_of_phi(p, phi_c);
    let energy = energy_of_phi(p, phi_c)?;
    let (g, g_prime) = couplings_at(p, phi_c)?;

    let ratio = g / g_prime;
    let energy_over_g = (energy / g).abs();
    let tunneling_rate = s.omega_f * (-p.ej_over_ec.sqrt()).exp();
    let tunneling_error_prob = ((tunneling_rate / g).powi(2)).min(1.0);
    let thermal_occupation = (-(p.v_f / p.length) / p.temperature).exp();

    let regime_flags = vec![
        RegimeFlag {
            name: "strongBranchLambda",
            value: lambda,
            threshold: -BRANCH_THRESHOLD,
            passed: lambda <= -BRANCH_THRESHOLD,
        },
        RegimeFlag {
            name: "gOverGPrime",
            value: ratio.abs(),
            threshold: RATIO_THRESHOLD,
            // small tolerance: set 2 sits on the threshold by construction
            passed: ratio.abs() >= RATIO_THRESHOLD * (1.0 - 1e-3),
        },
        RegimeFlag {
            name: "energyOverG",
            value: energy_over_g,
            threshold: ENERGY_OVER_G_THRESHOLD,
            passed: energy_over_g >= ENERGY_OVER_G_THRESHOLD,
        },
    ];

    Ok(ValidityReport {
        ratio_g_over_g_prime: ratio,
        energy_over_g,
        tunneling_rate,
        tunneling_error_prob,
        thermal_occupation,
        regime_flags,
    })
}
