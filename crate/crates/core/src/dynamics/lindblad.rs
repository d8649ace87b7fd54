use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation_op, embed, flux_sigma_z, pauli_x, sigma_minus, sigma_plus, spin_z, DensityMatrix,
    HilbertSpec, Operator, Subsystem, C64, I,
};

/// Flux-qubit relaxation and dephasing times in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NoiseParams {
    pub tf1: f64,
    pub tf2: f64,
    pub enabled: bool,
}

impl NoiseParams {
    pub fn new(tf1: f64, tf2: f64) -> Result<Self> {
        let n = Self {
            tf1,
            tf2,
            enabled: true,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn disabled() -> Self {
        Self {
            tf1: f64::INFINITY,
            tf2: f64::INFINITY,
            enabled: false,
        }
    }

    /// From η1 = 1/(2T_f1) and η2 = 1/T_f2 in ns⁻¹; zero rates mean no channel.
    pub fn from_rates(eta1: f64, eta2: f64) -> Result<Self> {
        if eta1 < 0.0 || eta2 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "decoherence rates must be >= 0 (eta1 = {eta1}, eta2 = {eta2})"
            )));
        }
        Self::new(1.0 / (2.0 * eta1), 1.0 / eta2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled && !(self.tf1 > 0.0 && self.tf2 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Tf1 = {}, Tf2 = {} must be > 0",
                self.tf1, self.tf2
            )));
        }
        Ok(())
    }

    /// 1/T_f1, or 0 when disabled.
    pub fn relaxation_rate(&self) -> f64 {
        if self.enabled {
            1.0 / self.tf1
        } else {
            0.0
        }
    }

    /// 1/T_f2, or 0 when disabled.
    pub fn dephasing_rate(&self) -> f64 {
        if self.enabled {
            1.0 / self.tf2
        } else {
            0.0
        }
    }

    pub fn eta1(&self) -> f64 {
        0.5 * self.relaxation_rate()
    }

    pub fn eta2(&self) -> f64 {
        self.dephasing_rate()
    }
}

/// Operators used by the Hamiltonians and dissipators, built once per
/// Hilbert space.
#[derive(Debug, Clone)]
pub struct SystemOperators {
    pub spec: HilbertSpec,
    pub a: Operator,
    pub a_dag: Operator,
    pub number: Operator,
    pub flux_z: Operator,
    pub sigma_minus: Operator,
    pub sigma_plus: Operator,
    /// a†σ_t^− + aσ_t^+.
    pub jc: Operator,
    /// σ_f^z σ_t^+.
    pub flux_z_sigma_plus: Operator,
    /// Topological σ_x, σ_z in the rotated basis.
    pub spin_x: Operator,
    pub spin_z: Operator,
}

impl SystemOperators {
    pub fn new(spec: HilbertSpec) -> Self {
        let n = spec.fock_levels();
        let lift_flux = |op: &Operator| embed(op, Subsystem::Flux, &spec).expect("flux dim");
        let lift_topo = |op: &Operator| embed(op, Subsystem::Topological, &spec).expect("topo dim");

        let a = lift_flux(&annihilation_op(n).expect("N >= 2"));
        let a_dag = a.dagger();
        let number = &a_dag * &a;
        let flux_z = lift_flux(&flux_sigma_z(n).expect("N >= 2"));
        let sm = lift_topo(&sigma_minus());
        let sp = lift_topo(&sigma_plus());
        let jc = &(&a_dag * &sm) + &(&a * &sp);
        let flux_z_sigma_plus = &flux_z * &sp;
        Self {
            spec,
            a,
            a_dag,
            number,
            flux_z,
            sigma_minus: sm,
            sigma_plus: sp,
            jc,
            flux_z_sigma_plus,
            spin_x: lift_topo(&pauli_x()),
            spin_z: lift_topo(&spin_z()),
        }
    }
}

/// Lindblad generator with relaxation (operator a) and dephasing (σ_f^z).
#[derive(Debug, Clone)]
pub struct Lindbladian {
    a: DMatrix<C64>,
    a_dag: DMatrix<C64>,
    number: DMatrix<C64>,
    flux_z: DMatrix<C64>,
    flux_z_sq: DMatrix<C64>,
    gamma1: f64,
    gamma2: f64,
}

impl Lindbladian {
    pub fn new(ops: &SystemOperators, noise: &NoiseParams) -> Self {
        Self {
            a: ops.a.matrix().clone(),
            a_dag: ops.a_dag.matrix().clone(),
            number: ops.number.matrix().clone(),
            flux_z: ops.flux_z.matrix().clone(),
            flux_z_sq: ops.flux_z.matrix() * ops.flux_z.matrix(),
            gamma1: noise.relaxation_rate(),
            gamma2: noise.dephasing_rate(),
        }
    }

    /// dρ/dt = −i[H, ρ] + γ1/2 (2aρa† − a†aρ − ρa†a) + γ2 (σ_f^z ρ σ_f^z − ½{(σ_f^z)², ρ}).
    ///
    /// (σ_f^z)² is the identity for N = 2, where the last term is γ2 (σ_f^z ρ σ_f^z − ρ);
    /// on larger truncations it projects onto the two flux-qubit levels.
    pub fn rhs(&self, h: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = rho.nrows();
        let mut out = DMatrix::zeros(d, d);
        let mut scratch = DMatrix::zeros(d, d);
        self.rhs_into(h, rho, &mut out, &mut scratch);
        out
    }

    /// Allocation-free form of [`Lindbladian::rhs`]; `scratch` is clobbered.
    pub fn rhs_into(
        &self,
        h: &DMatrix<C64>,
        rho: &DMatrix<C64>,
        out: &mut DMatrix<C64>,
        scratch: &mut DMatrix<C64>,
    ) {
        let d = rho.nrows();
        let (o, r) = (out.as_mut_slice(), rho.as_slice());
        let zero = C64::new(0.0, 0.0);
        o.fill(zero);
        left(o, -I, h.as_slice(), r, d);
        right(o, I, r, h.as_slice(), d);
        let s = scratch.as_mut_slice();
        if self.gamma1 != 0.0 {
            let half = C64::new(-0.5 * self.gamma1, 0.0);
            s.fill(zero);
            left(s, C64::new(self.gamma1, 0.0), self.a.as_slice(), r, d);
            right(o, C64::new(1.0, 0.0), s, self.a_dag.as_slice(), d);
            left(o, half, self.number.as_slice(), r, d);
            right(o, half, r, self.number.as_slice(), d);
        }
        if self.gamma2 != 0.0 {
            let half = C64::new(-0.5 * self.gamma2, 0.0);
            s.fill(zero);
            left(s, C64::new(self.gamma2, 0.0), self.flux_z.as_slice(), r, d);
            right(o, C64::new(1.0, 0.0), s, self.flux_z.as_slice(), d);
            left(o, half, self.flux_z_sq.as_slice(), r, d);
            right(o, half, r, self.flux_z_sq.as_slice(), d);
        }
    }
}

fn is_zero(z: C64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// out += alpha·op·m, column-major d×d, visiting only non-zeros of `op`.
fn left(out: &mut [C64], alpha: C64, op: &[C64], m: &[C64], d: usize) {
    for k in 0..d {
        for i in 0..d {
            let v = op[i + k * d];
            if is_zero(v) {
                continue;
            }
            let c = alpha * v;
            for j in 0..d {
                out[i + j * d] += c * m[k + j * d];
            }
        }
    }
}

/// out += alpha·m·op, visiting only non-zeros of `op`.
fn right(out: &mut [C64], alpha: C64, m: &[C64], op: &[C64], d: usize) {
    for j in 0..d {
        for k in 0..d {
            let v = op[k + j * d];
            if is_zero(v) {
                continue;
            }
            let c = alpha * v;
            let (col, src) = (&mut out[j * d..(j + 1) * d], &m[k * d..(k + 1) * d]);
            for (o, &x) in col.iter_mut().zip(src) {
                *o += x * c;
            }
        }
    }
}

/// Right-hand side of the master equation for one state.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h: &Operator,
    noise: &NoiseParams,
    spec: &HilbertSpec,
) -> Result<DMatrix<C64>> {
    if rho.dim() != spec.dim() || h.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: if rho.dim() != spec.dim() {
                rho.dim()
            } else {
                h.dim()
            },
        });
    }
    let ops = SystemOperators::new(*spec);
    Ok(Lindbladian::new(&ops, noise).rhs(h.matrix(), rho.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Spin, StateVector};

    fn spec() -> HilbertSpec {
        HilbertSpec::default()
    }

    #[test]
    fn dark_state_is_stationary() {
        let spec = spec();
        let ops = SystemOperators::new(spec);
        let h = ops.jc.scale(C64::new(-0.5 * 12.9, 0.0));
        let rho = DensityMatrix::pure(&StateVector::basis(&spec, Spin::Down, 0));
        let d = lindblad_rhs(&rho, &h, &NoiseParams::disabled(), &spec).unwrap();
        assert!(d.iter().all(|z| z.norm() < 1e-15));
        let d = lindblad_rhs(&rho, &h, &NoiseParams::new(900.0, 20.0).unwrap(), &spec).unwrap();
        assert!(d.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn relaxation_of_excited_flux() {
        let spec = spec();
        let t1 = 900.0;
        let noise = NoiseParams::new(t1, 20.0).unwrap();
        let rho = DensityMatrix::pure(&StateVector::basis(&spec, Spin::Down, 1));
        let d = lindblad_rhs(&rho, &Operator::zeros(4), &noise, &spec).unwrap();
        let i11 = spec.index(Spin::Down, 1);
        let i00 = spec.index(Spin::Down, 0);
        assert!((d[(i11, i11)].re + 1.0 / t1).abs() < 1e-15);
        assert!((d[(i00, i00)].re - 1.0 / t1).abs() < 1e-15);
        assert!(d.trace().norm() < 1e-15);
    }

    #[test]
    fn coherence_decay_rate() {
        let spec = spec();
        let (t1, t2) = (900.0, 20.0);
        let noise = NoiseParams::new(t1, t2).unwrap();
        let up0 = StateVector::basis(&spec, Spin::Up, 0);
        let down1 = StateVector::basis(&spec, Spin::Down, 1);
        let psi = StateVector::normalized(up0.amplitudes() + down1.amplitudes()).unwrap();
        let rho = DensityMatrix::pure(&psi);
        let d = lindblad_rhs(&rho, &Operator::zeros(4), &noise, &spec).unwrap();
        let (i, j) = (spec.index(Spin::Up, 0), spec.index(Spin::Down, 1));
        let rate = -d[(i, j)].re / rho.element(i, j).re;
        assert!((rate - (1.0 / (2.0 * t1) + 2.0 / t2)).abs() < 1e-12);
    }

    #[test]
    fn generator_is_traceless() {
        let spec = HilbertSpec::new(3).unwrap();
        let ops = SystemOperators::new(spec);
        let h = &ops.jc.scale(C64::new(-1.3, 0.0))
            + &(&ops.flux_z_sigma_plus.scale(C64::new(0.2, 0.7))
                + &ops.flux_z_sigma_plus.dagger().scale(C64::new(0.2, -0.7)));
        let amps = nalgebra::DVector::from_fn(6, |i, _| C64::new(1.0 + i as f64, 0.3 * i as f64));
        let rho = DensityMatrix::pure(&StateVector::normalized(amps).unwrap());
        let d = lindblad_rhs(&rho, &h, &NoiseParams::new(50.0, 3.0).unwrap(), &spec).unwrap();
        assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn rates_round_trip() {
        let n = NoiseParams::from_rates(1.0 / 1800.0, 0.05).unwrap();
        assert!((n.tf1 - 900.0).abs() < 1e-9 && (n.tf2 - 20.0).abs() < 1e-12);
        let zero = NoiseParams::from_rates(0.0, 0.0).unwrap();
        assert_eq!(zero.relaxation_rate(), 0.0);
        assert_eq!(zero.dephasing_rate(), 0.0);
        assert!(NoiseParams::from_rates(-1.0, 0.0).is_err());
        assert!(NoiseParams::new(0.0, 1.0).is_err());
    }
}
