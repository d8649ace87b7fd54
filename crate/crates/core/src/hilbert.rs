//! Dense operators and states on the composite topological ⊗ flux space.
//!
//! Basis order is topological-major: composite index `i = s·N + n`, where
//! `s = 0` is |↓⟩, `s = 1` is |↑⟩ and `n` is the flux-mode occupation. For
//! `N = 2` the four states are |↓0⟩, |↓1⟩, |↑0⟩, |↑1⟩ in that order.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest composite dimension the dense routines are meant for.
pub const MAX_DIM: usize = 64;

/// Flux-mode truncation shared by every operator in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpec {
    fock_levels: usize,
}

impl HilbertSpec {
    pub fn new(fock_levels: usize) -> Result<Self> {
        if fock_levels < 2 || 2 * fock_levels > MAX_DIM {
            return Err(Error::InvalidTruncation(fock_levels));
        }
        Ok(Self { fock_levels })
    }

    pub fn fock_levels(&self) -> usize {
        self.fock_levels
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_levels
    }

    /// Composite index of |s, n⟩.
    pub fn index(&self, spin: Spin, n: usize) -> usize {
        debug_assert!(n < self.fock_levels);
        spin.index() * self.fock_levels + n
    }
}

impl Default for HilbertSpec {
    fn default() -> Self {
        Self { fock_levels: 2 }
    }
}

/// Topological qubit state in the rotated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    fn index(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Topological,
    Flux,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "operator must be square");
        Self { m }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::from_matrix(DMatrix::from_diagonal(&v))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self::from_matrix(self.m.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_matrix(&self.m * c)
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.m)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        Self::from_matrix(&self.m * &other.m - &other.m * &self.m)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(&self.m * psi.amplitudes())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.m * &rhs.m)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.m + &rhs.m)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.m - &rhs.m)
    }
}

/// Normalised pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(amps: DVector<C64>) -> Result<Self> {
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() >= Self::NORM_TOL {
            return Err(Error::InvalidState(format!("|psi|^2 = {n2}, expected 1")));
        }
        Ok(Self { amps })
    }

    /// Normalises `amps`; fails only for the zero vector.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amps: amps / C64::new(n, 0.0),
        })
    }

    /// Basis ket |spin, n⟩.
    pub fn basis(spec: &HilbertSpec, spin: Spin, n: usize) -> Self {
        let mut amps = DVector::zeros(spec.dim());
        amps[spec.index(spin, n)] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn scale_phase(&self, phase: C64) -> Self {
        Self {
            amps: &self.amps * phase,
        }
    }

    pub fn projector(&self) -> DMatrix<C64> {
        &self.amps * self.amps.adjoint()
    }
}

/// Validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-7;
    pub const HERMITIAN_TOL: f64 = 1e-9;
    pub const POSITIVITY_TOL: f64 = -1e-8;

    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let rho = Self { m };
        let drift = (rho.trace() - 1.0).abs();
        if drift >= Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("|tr rho - 1| = {drift:e}")));
        }
        let herm = rho.hermiticity_error();
        if herm >= Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "max |rho - rho^dag| = {herm:e}"
            )));
        }
        let min = rho.min_eigenvalue();
        if min <= Self::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("min eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Wraps a matrix without checking invariants; for integrator output
    /// whose diagnostics are reported separately.
    pub fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        Self { m }
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self { m: psi.projector() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        (&self.m * &self.m).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.m)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }
}

fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Kronecker product, `(A⊗B)[iB·p+q, jB·r+s] = A[p,r]·B[q,s]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator::from_matrix(a.m.kronecker(&b.m))
}

/// Truncated flux-mode lowering operator, `a[n−1, n] = √n`.
pub fn annihilation_op(n_levels: usize) -> Result<Operator> {
    if n_levels < 2 {
        return Err(Error::InvalidTruncation(n_levels));
    }
    let mut m = DMatrix::zeros(n_levels, n_levels);
    for n in 1..n_levels {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator::from_matrix(m))
}

/// σ_t^− = |↓⟩⟨↑| on the topological qubit.
pub fn sigma_minus() -> Operator {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = ONE;
    Operator::from_matrix(m)
}

/// σ_t^+ = |↑⟩⟨↓|.
pub fn sigma_plus() -> Operator {
    sigma_minus().dagger()
}

pub fn pauli_x() -> Operator {
    Operator::from_matrix(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
}

/// |↑⟩⟨↑| − |↓⟩⟨↓| in the rotated topological basis.
pub fn spin_z() -> Operator {
    Operator::from_real_diagonal(&[-1.0, 1.0])
}

/// σ_f^z = |0⟩⟨0| − |1⟩⟨1| on the flux mode; zero on levels n ≥ 2.
pub fn flux_sigma_z(n_levels: usize) -> Result<Operator> {
    if n_levels < 2 {
        return Err(Error::InvalidTruncation(n_levels));
    }
    let mut diag = vec![0.0; n_levels];
    diag[0] = 1.0;
    diag[1] = -1.0;
    Ok(Operator::from_real_diagonal(&diag))
}

/// Lifts a single-subsystem operator onto the composite space.
pub fn embed(op: &Operator, subsystem: Subsystem, spec: &HilbertSpec) -> Result<Operator> {
    match subsystem {
        Subsystem::Topological => {
            check_dim(2, op.dim())?;
            Ok(kron(op, &Operator::identity(spec.fock_levels())))
        }
        Subsystem::Flux => {
            check_dim(spec.fock_levels(), op.dim())?;
            Ok(kron(&Operator::identity(2), op))
        }
    }
}

/// ⟨bra|ρ|ket⟩.
pub fn matrix_element(rho: &DensityMatrix, bra: &StateVector, ket: &StateVector) -> Result<C64> {
    check_dim(rho.dim(), bra.dim())?;
    check_dim(rho.dim(), ket.dim())?;
    Ok(bra.amplitudes().dotc(&(&rho.m * ket.amplitudes())))
}

/// ⟨ψ|ρ|ψ⟩ for a pure target.
pub fn fidelity_pure(target: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    let f = matrix_element(rho, target, target)?;
    debug_assert!(f.im.abs() < 1e-10, "imaginary fidelity part {}", f.im);
    Ok(f.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Index-formula Kronecker product, independent of nalgebra's.
    fn kron_oracle(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        let (ra, ca) = a.shape();
        let (rb, cb) = b.shape();
        let mut out = DMatrix::zeros(ra * rb, ca * cb);
        for p in 0..ra {
            for r in 0..ca {
                for q in 0..rb {
                    for s in 0..cb {
                        out[(rb * p + q, cb * r + s)] = a[(p, r)] * b[(q, s)];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i4 = kron(&Operator::identity(2), &Operator::identity(2));
        assert_eq!(i4, Operator::identity(4));

        let d = kron(
            &Operator::from_real_diagonal(&[1.0, 2.0]),
            &Operator::from_real_diagonal(&[3.0, 4.0]),
        );
        assert_eq!(d, Operator::from_real_diagonal(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_matches_index_formula() {
        let a = DMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let b = DMatrix::from_fn(3, 2, |i, j| C64::new((i * j) as f64, 1.0 + i as f64));
        let ours = a.kronecker(&b);
        assert_eq!(ours, kron_oracle(&a, &b));
    }

    #[test]
    fn basis_order_topological_major() {
        let spec = HilbertSpec::new(2).unwrap();
        let sx = embed(&pauli_x(), Subsystem::Topological, &spec).unwrap();
        let down0 = StateVector::basis(&spec, Spin::Down, 0);
        assert_eq!(spec.index(Spin::Down, 0), 0);
        assert_eq!(spec.index(Spin::Up, 0), 2);
        let out = sx.apply(&down0).unwrap();
        assert_eq!(
            out,
            StateVector::basis(&spec, Spin::Up, 0).amplitudes().clone()
        );
    }

    #[test]
    fn annihilation_entries() {
        assert!(matches!(
            annihilation_op(1),
            Err(Error::InvalidTruncation(1))
        ));
        let a2 = annihilation_op(2).unwrap();
        assert_eq!(
            a2.matrix(),
            &DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
        );
        let a3 = annihilation_op(3).unwrap();
        assert_eq!(a3.matrix()[(0, 1)], ONE);
        assert!((a3.matrix()[(1, 2)] - c(2f64.sqrt())).norm() < 1e-15);
        let nonzero = a3.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        let num = &a3.dagger() * &a3;
        assert!(
            (num.matrix() - Operator::from_real_diagonal(&[0.0, 1.0, 2.0]).matrix()).norm() < 1e-14
        );
    }

    #[test]
    fn truncated_commutator() {
        for n in 2..=6 {
            let a = annihilation_op(n).unwrap();
            let comm = a.commutator(&a.dagger());
            let mut expect = vec![1.0; n];
            expect[n - 1] = 1.0 - n as f64;
            let diff = comm.matrix() - Operator::from_real_diagonal(&expect).matrix();
            assert!(max_abs(&diff) < 1e-12);
        }
    }

    #[test]
    fn embed_actions() {
        let spec = HilbertSpec::new(2).unwrap();
        let sm = embed(&sigma_minus(), Subsystem::Topological, &spec).unwrap();
        let out = sm.apply(&StateVector::basis(&spec, Spin::Up, 0)).unwrap();
        assert_eq!(&out, StateVector::basis(&spec, Spin::Down, 0).amplitudes());

        let a = embed(&annihilation_op(2).unwrap(), Subsystem::Flux, &spec).unwrap();
        let out = a.apply(&StateVector::basis(&spec, Spin::Up, 1)).unwrap();
        assert_eq!(&out, StateVector::basis(&spec, Spin::Up, 0).amplitudes());

        let z = embed(&flux_sigma_z(2).unwrap(), Subsystem::Flux, &spec).unwrap();
        assert_eq!(z, Operator::from_real_diagonal(&[1.0, -1.0, 1.0, -1.0]));

        assert!(matches!(
            embed(&pauli_x(), Subsystem::Flux, &HilbertSpec::new(3).unwrap()),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn flux_sigma_z_truncated_levels_vanish() {
        let z = flux_sigma_z(4).unwrap();
        assert_eq!(z, Operator::from_real_diagonal(&[1.0, -1.0, 0.0, 0.0]));
    }

    #[test]
    fn matrix_elements() {
        let spec = HilbertSpec::default();
        let up0 = StateVector::basis(&spec, Spin::Up, 0);
        let down1 = StateVector::basis(&spec, Spin::Down, 1);
        let rho = DensityMatrix::pure(&up0);
        assert_eq!(matrix_element(&rho, &up0, &up0).unwrap(), ONE);
        assert_eq!(matrix_element(&rho, &down1, &down1).unwrap(), ZERO);

        // ½(|↑0⟩ + i|↓1⟩)(⟨↑0| − i⟨↓1|)
        let psi = StateVector::normalized(up0.amplitudes() + down1.amplitudes() * I).unwrap();
        let rho = DensityMatrix::pure(&psi);
        let el = matrix_element(&rho, &up0, &down1).unwrap();
        assert!((el - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn pure_fidelities() {
        let spec = HilbertSpec::default();
        let up0 = StateVector::basis(&spec, Spin::Up, 0);
        let down1 = StateVector::basis(&spec, Spin::Down, 1);
        let rho = DensityMatrix::pure(&down1);
        assert!((fidelity_pure(&down1, &rho).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity_pure(&down1.scale_phase(-I), &rho).unwrap() - 1.0).abs() < 1e-15);

        let target = StateVector::normalized(up0.amplitudes() - down1.amplitudes() * I).unwrap();
        let mixed = (up0.projector() + down1.projector()) * c(0.5);
        let rho = DensityMatrix::new(mixed).unwrap();
        assert!((fidelity_pure(&target, &rho).unwrap() - 0.5).abs() < 1e-15);

        let wrong = StateVector::basis(&HilbertSpec::new(3).unwrap(), Spin::Up, 0);
        assert!(fidelity_pure(&wrong, &rho).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let spec = HilbertSpec::default();
        let up0 = StateVector::basis(&spec, Spin::Up, 0);
        assert!(DensityMatrix::new(up0.projector() * c(2.0)).is_err());
        let mut m = up0.projector();
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.1), c(-0.1), c(0.0), c(0.0)]));
        assert!(DensityMatrix::new(neg).is_err());
        assert!(StateVector::new(DVector::from_element(4, ONE)).is_err());
    }
}
