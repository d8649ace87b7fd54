//! Two-qubit gates on the computational subspace {|↓0⟩, |↓1⟩, |↑0⟩, |↑1⟩}.
//!
//! The JC pulse of area A acts on span{|↑0⟩, |↓1⟩} as cos(A/2)·I + i·sin(A/2)·σ_x
//! and leaves |↓0⟩ and |↑1⟩ alone. A −3π/2 pulse is the entangling primitive
//! used for the controlled-phase synthesis; it is of √iSWAP type, so the
//! synthesis is checked with local invariants rather than assumed.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::dynamics::{propagate_matrix, NoiseParams, PulseSchedule, PulseSegment, PulseShape};
use crate::error::{Error, Result};
use crate::hilbert::{Subsystem, C64, I, ONE, ZERO};

pub const DIM: usize = 4;
const UNITARY_TOL: f64 = 1e-10;
/// Invariant distance below which two gates are called locally equivalent.
pub const EQUIVALENCE_TOL: f64 = 1e-8;

/// 4×4 unitary on the two-qubit computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix(pub Matrix4<C64>);

impl GateMatrix {
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let g = Self(m);
        let err = g.unitarity_error();
        if err >= UNITARY_TOL {
            return Err(Error::NonUnitary(err));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn unitarity_error(&self) -> f64 {
        (self.0.adjoint() * self.0 - Matrix4::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn max_distance(&self, other: &GateMatrix) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Row-major `[re, im]` entries for serialisation.
    pub fn entries(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(16);
        for r in 0..DIM {
            for c in 0..DIM {
                let z = self.0[(r, c)];
                out.push([z.re, z.im]);
            }
        }
        out
    }
}

impl std::ops::Mul for GateMatrix {
    type Output = GateMatrix;
    fn mul(self, rhs: GateMatrix) -> GateMatrix {
        GateMatrix(self.0 * rhs.0)
    }
}

fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
}

const ID2: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

/// Closed-form JC pulse of area `area` = ∫g dt (closed system, g′ = 0, resonance).
pub fn ideal_pulse_unitary(area: f64) -> GateMatrix {
    let (c, s) = ((area / 2.0).cos(), (area / 2.0).sin());
    let mut m = Matrix4::identity();
    // |↓1⟩ = 1, |↑0⟩ = 2
    m[(1, 1)] = C64::new(c, 0.0);
    m[(2, 2)] = C64::new(c, 0.0);
    m[(1, 2)] = I * s;
    m[(2, 1)] = I * s;
    GateMatrix(m)
}

/// diag(e^{−iθ/2}, e^{iθ/2}) on `target`, θ in degrees.
pub fn rz(target: Subsystem, angle_deg: f64) -> GateMatrix {
    let half = 0.5 * angle_deg * PI / 180.0;
    let r = [
        [C64::from_polar(1.0, -half), ZERO],
        [ZERO, C64::from_polar(1.0, half)],
    ];
    GateMatrix(match target {
        Subsystem::Topological => kron2(&r, &ID2),
        Subsystem::Flux => kron2(&ID2, &r),
    })
}

/// The −3π/2 pulse used as the entangling primitive.
pub fn pulse_sqrt_swap() -> GateMatrix {
    ideal_pulse_unitary(-1.5 * PI)
}

/// Rz_t(90)·Rz_f(−90)·S·Rz_t(180)·S with S the −3π/2 pulse; the rightmost
/// factor acts first.
pub fn synthesize_cp() -> GateMatrix {
    let s = pulse_sqrt_swap();
    rz(Subsystem::Topological, 90.0)
        * rz(Subsystem::Flux, -90.0)
        * s
        * rz(Subsystem::Topological, 180.0)
        * s
}

/// Same factors applied in the opposite order (leftmost acts first).
pub fn synthesize_cp_reversed() -> GateMatrix {
    let s = pulse_sqrt_swap();
    s * rz(Subsystem::Topological, 180.0)
        * s
        * rz(Subsystem::Flux, -90.0)
        * rz(Subsystem::Topological, 90.0)
}

pub fn cz() -> GateMatrix {
    GateMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        ONE, ONE, ONE, -ONE,
    )))
}

pub fn cnot() -> GateMatrix {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    GateMatrix(m)
}

pub fn swap() -> GateMatrix {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    GateMatrix(m)
}

pub fn iswap() -> GateMatrix {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 2)] = I;
    m[(2, 1)] = I;
    m[(3, 3)] = ONE;
    GateMatrix(m)
}

/// Canonical √SWAP: ½(1±i) on the exchange block.
pub fn canonical_sqrt_swap() -> GateMatrix {
    let p = C64::new(0.5, 0.5);
    let q = C64::new(0.5, -0.5);
    let mut m = Matrix4::identity();
    m[(1, 1)] = p;
    m[(2, 2)] = p;
    m[(1, 2)] = q;
    m[(2, 1)] = q;
    GateMatrix(m)
}

pub fn sqrt_iswap() -> GateMatrix {
    let c = C64::new(FRAC_1_SQRT_2, 0.0);
    let s = I * FRAC_1_SQRT_2;
    let mut m = Matrix4::identity();
    m[(1, 1)] = c;
    m[(2, 2)] = c;
    m[(1, 2)] = s;
    m[(2, 1)] = s;
    GateMatrix(m)
}

/// Makhlin local invariants (G1 complex, G2 real).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalInvariants {
    pub g1: [f64; 2],
    pub g2: f64,
}

impl LocalInvariants {
    pub fn g1(&self) -> C64 {
        C64::new(self.g1[0], self.g1[1])
    }

    pub fn distance(&self, other: &LocalInvariants) -> f64 {
        (self.g1() - other.g1())
            .norm()
            .max((self.g2 - other.g2).abs())
    }
}

fn magic_basis() -> Matrix4<C64> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let ih = I * FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let q = Matrix4::new(
        h,    ZERO, ZERO, ih,
        ZERO, ih,   h,    ZERO,
        ZERO, ih,   -h,   ZERO,
        h,    ZERO, ZERO, -ih,
    );
    q
}

/// G1 = tr²(m)/(16 det U), G2 = (tr²(m) − tr(m²))/(4 det U), with
/// m = U_Bᵀ U_B in the magic basis.
pub fn makhlin_invariants(u: &GateMatrix) -> Result<LocalInvariants> {
    let err = u.unitarity_error();
    if err >= UNITARY_TOL {
        return Err(Error::NonUnitary(err));
    }
    let q = magic_basis();
    let ub = q.adjoint() * u.0 * q;
    let m = ub.transpose() * ub;
    let det = u.0.determinant();
    let tr = m.trace();
    let tr2 = (m * m).trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - tr2) / (det * 4.0);
    Ok(LocalInvariants {
        g1: [g1.re, g1.im],
        g2: g2.re,
    })
}

pub fn locally_equivalent(a: &GateMatrix, b: &GateMatrix) -> Result<bool> {
    Ok(makhlin_invariants(a)?.distance(&makhlin_invariants(b)?) < EQUIVALENCE_TOL)
}

/// Phase-insensitive |tr(U†V)|²/d².
pub fn gate_fidelity(u: &GateMatrix, v: &GateMatrix) -> f64 {
    let t = (u.0.adjoint() * v.0).trace();
    (t.norm_sqr() / (DIM * DIM) as f64).clamp(0.0, 1.0)
}

/// Pulse unitary extracted from the master-equation integrator (N = 2,
/// noise off, g′ = 0) by propagating |i⟩⟨↓0| for each basis state.
/// |↓0⟩ is dark, so the result's first column is U|i⟩ up to one global phase.
pub fn pulse_unitary_from_dynamics(area: f64, g: f64, phase_freq: f64) -> Result<GateMatrix> {
    let duration = crate::dynamics::pulse_duration_for_area(area, g, PulseShape::Rectangular)?;
    let seg = PulseSegment {
        duration,
        g,
        g_prime: 0.0,
        phase_freq,
        shape: PulseShape::Rectangular,
    };
    let schedule = PulseSchedule::single(seg, duration)?;
    let dt = crate::dynamics::default_dt(&schedule);
    let mut u = Matrix4::zeros();
    for i in 0..DIM {
        let mut x = DMatrix::zeros(DIM, DIM);
        x[(i, 0)] = ONE;
        let out = propagate_matrix(&x, &schedule, &NoiseParams::disabled(), dt)?;
        for r in 0..DIM {
            u[(r, i)] = out[(r, 0)];
        }
    }
    Ok(GateMatrix(u))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GateReport {
    pub entries: Vec<[f64; 2]>,
    pub unitarity_error: f64,
    pub invariants: LocalInvariants,
}

impl GateReport {
    fn of(g: &GateMatrix) -> Result<Self> {
        Ok(Self {
            entries: g.entries(),
            unitarity_error: g.unitarity_error(),
            invariants: makhlin_invariants(g)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CpVerification {
    /// Rightmost factor first.
    pub right_to_left: GateReport,
    pub right_to_left_equivalent_to_cz: bool,
    pub right_to_left_fidelity_to_cz: f64,
    /// Leftmost factor first.
    pub left_to_right: GateReport,
    pub left_to_right_equivalent_to_cz: bool,
    pub left_to_right_fidelity_to_cz: f64,
    pub cz_invariants: LocalInvariants,
    pub pulse_sqrt_swap: GateReport,
    pub canonical_sqrt_swap_invariants: LocalInvariants,
    pub sqrt_iswap_invariants: LocalInvariants,
    pub pulse_equivalent_to_canonical_sqrt_swap: bool,
    pub pulse_equivalent_to_sqrt_iswap: bool,
    pub dynamics_pi_pulse_fidelity: f64,
    pub verdict: String,
}

/// Local-invariant comparison of the CP synthesis against CZ, in both
/// operator orders, plus the pulse primitive against √SWAP and √iSWAP.
pub fn verify_cp(g: f64, phase_freq: f64) -> Result<CpVerification> {
    let cz = cz();
    let rl = synthesize_cp();
    let lr = synthesize_cp_reversed();
    let pulse = pulse_sqrt_swap();
    let rl_eq = locally_equivalent(&rl, &cz)?;
    let lr_eq = locally_equivalent(&lr, &cz)?;
    let to_canonical = locally_equivalent(&pulse, &canonical_sqrt_swap())?;
    let to_iswap = locally_equivalent(&pulse, &sqrt_iswap())?;
    let dynamics = pulse_unitary_from_dynamics(-PI, g, phase_freq)?;

    let verdict = format!(
        "-3pi/2 pulse is {} to canonical sqrt(SWAP) and {} to sqrt(iSWAP); \
         CP synthesis (right-to-left) is {} to CZ; (left-to-right) is {} to CZ",
        equiv_word(to_canonical),
        equiv_word(to_iswap),
        equiv_word(rl_eq),
        equiv_word(lr_eq),
    );

    Ok(CpVerification {
        right_to_left: GateReport::of(&rl)?,
        right_to_left_equivalent_to_cz: rl_eq,
        right_to_left_fidelity_to_cz: gate_fidelity(&rl, &cz),
        left_to_right: GateReport::of(&lr)?,
        left_to_right_equivalent_to_cz: lr_eq,
        left_to_right_fidelity_to_cz: gate_fidelity(&lr, &cz),
        cz_invariants: makhlin_invariants(&cz)?,
        pulse_sqrt_swap: GateReport::of(&pulse)?,
        canonical_sqrt_swap_invariants: makhlin_invariants(&canonical_sqrt_swap())?,
        sqrt_iswap_invariants: makhlin_invariants(&sqrt_iswap())?,
        pulse_equivalent_to_canonical_sqrt_swap: to_canonical,
        pulse_equivalent_to_sqrt_iswap: to_iswap,
        dynamics_pi_pulse_fidelity: gate_fidelity(&dynamics, &ideal_pulse_unitary(-PI)),
        verdict,
    })
}

fn equiv_word(b: bool) -> &'static str {
    if b {
        "locally equivalent"
    } else {
        "NOT locally equivalent"
    }
}
