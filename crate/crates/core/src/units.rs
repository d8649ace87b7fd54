//! Conversions between on-disk units and the internal system
//! (angular frequency in rad/ns, time in ns, length in μm, ħ = 1).

use std::f64::consts::PI;

/// k_B/ħ in rad·s⁻¹·K⁻¹.
const KB_OVER_HBAR: f64 = 1.380_649e-23 / 1.054_571_817e-34;

/// Ordinary frequency in GHz (ω/2π) to angular frequency in rad/ns.
pub fn ghz_to_rad_per_ns(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

pub fn rad_per_ns_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// m/s to μm/ns.
pub fn mps_to_um_per_ns(v: f64) -> f64 {
    v * 1e-3
}

pub fn um_per_ns_to_mps(v: f64) -> f64 {
    v * 1e3
}

/// Temperature in mK to k_B·T/ħ in rad/ns.
pub fn millikelvin_to_rad_per_ns(t_mk: f64) -> f64 {
    KB_OVER_HBAR * t_mk * 1e-3 * 1e-9
}

pub fn rad_per_ns_to_millikelvin(omega: f64) -> f64 {
    omega / (KB_OVER_HBAR * 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_millikelvin() {
        let t = millikelvin_to_rad_per_ns(20.0);
        assert!((t - 2.618).abs() < 1e-3, "{t}");
        assert!((rad_per_ns_to_millikelvin(t) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn fermi_velocity_over_length() {
        assert!((mps_to_um_per_ns(1e5) / 5.0 - 20.0).abs() < 1e-12);
    }
}
