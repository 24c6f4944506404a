//! Truncated Fock ⊗ qubit Hilbert space.
//!
//! Basis index of `|a, n⟩` is `2n + (a == e)`, so cutting the photon ladder at
//! `n_max` only drops trailing rows and columns. Operators are dense complex
//! matrices; dimensions stay small (a few hundred at most).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QrmError, Result};
use crate::exec::Execution;

pub type C64 = Complex64;

/// Entrywise bound on `M - M†` for an operator tagged hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;
/// Largest imaginary residue silently discarded by [`expectation`].
pub const EXPECTATION_IMAG_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Ground,
    Excited,
}

impl Atom {
    fn offset(self) -> usize {
        match self {
            Atom::Ground => 0,
            Atom::Excited => 1,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Atom::Ground => "g",
            Atom::Excited => "e",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub fn new(n_max: usize) -> Self {
        HilbertSpace { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, atom: Atom, n: usize) -> Result<usize> {
        if n > self.n_max {
            return Err(QrmError::Truncation {
                needed: n,
                n_max: self.n_max,
            });
        }
        Ok(2 * n + atom.offset())
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn label(&self, idx: usize) -> (Atom, usize) {
        let atom = if idx % 2 == 1 {
            Atom::Excited
        } else {
            Atom::Ground
        };
        (atom, idx / 2)
    }

    fn check_same(&self, other: &HilbertSpace) -> Result<()> {
        if self != other {
            return Err(QrmError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn zero(space: HilbertSpace) -> Self {
        StateVector {
            space,
            amps: DVector::zeros(space.dim()),
        }
    }

    pub fn from_amplitudes(space: HilbertSpace, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(QrmError::DimensionMismatch {
                left: space.dim(),
                right: amps.len(),
            });
        }
        Ok(StateVector { space, amps })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Amplitude on `|atom, n⟩`; zero outside the truncation.
    pub fn amplitude(&self, atom: Atom, n: usize) -> C64 {
        self.space
            .index(atom, n)
            .map(|i| self.amps[i])
            .unwrap_or(ZERO)
    }

    pub(crate) fn add_to(&mut self, atom: Atom, n: usize, value: C64) -> Result<()> {
        let i = self.space.index(atom, n)?;
        self.amps[i] += value;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.check_same(&other.space)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            space: self.space,
            amps: &self.amps * factor,
        }
    }

    pub fn plus(&self, other: &StateVector) -> Result<StateVector> {
        self.space.check_same(&other.space)?;
        Ok(StateVector {
            space: self.space,
            amps: &self.amps + &other.amps,
        })
    }

    /// Max-abs amplitude difference (phase sensitive).
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest photon number carrying a nonzero amplitude.
    pub fn photon_support(&self) -> Option<usize> {
        self.amps
            .iter()
            .enumerate()
            .rev()
            .find(|(_, a)| a.norm() > 0.0)
            .map(|(i, _)| self.space.label(i).1)
    }
}

/// Unit vector `|atom, n⟩`.
pub fn basis_state(space: HilbertSpace, atom: Atom, n: usize) -> Result<StateVector> {
    let mut psi = StateVector::zero(space);
    psi.add_to(atom, n, ONE)?;
    Ok(psi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    entries: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Untagged operator.
    pub fn new(space: HilbertSpace, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(QrmError::DimensionMismatch {
                left: space.dim(),
                right: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(OperatorMatrix {
            space,
            entries,
            hermitian: false,
        })
    }

    /// Tags the operator hermitian after checking `max|M - M†| ≤ HERMITIAN_TOL`.
    pub fn new_hermitian(space: HilbertSpace, entries: DMatrix<C64>) -> Result<Self> {
        OperatorMatrix::new(space, entries)?.into_hermitian()
    }

    pub fn identity(space: HilbertSpace) -> Self {
        OperatorMatrix {
            space,
            entries: DMatrix::identity(space.dim(), space.dim()),
            hermitian: true,
        }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        OperatorMatrix {
            space,
            entries: DMatrix::zeros(space.dim(), space.dim()),
            hermitian: true,
        }
    }

    pub(crate) fn from_diagonal(space: HilbertSpace, f: impl Fn(Atom, usize) -> C64) -> Self {
        let diag = DVector::from_fn(space.dim(), |i, _| {
            let (atom, n) = space.label(i);
            f(atom, n)
        });
        let hermitian = diag.iter().all(|z| z.im == 0.0);
        OperatorMatrix {
            space,
            entries: DMatrix::from_diagonal(&diag),
            hermitian,
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn into_hermitian(mut self) -> Result<Self> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(QrmError::NotHermitian { deviation });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Tags without checking; used by builders whose output is hermitian by
    /// construction.
    pub(crate) fn assume_hermitian(mut self) -> Self {
        debug_assert!(self.hermiticity_deviation() <= HERMITIAN_TOL);
        self.hermitian = true;
        self
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            space: self.space,
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scaled(&self, factor: C64) -> OperatorMatrix {
        OperatorMatrix {
            space: self.space,
            entries: &self.entries * factor,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.check_same(&psi.space)?;
        Ok(StateVector {
            space: self.space,
            amps: &self.entries * &psi.amps,
        })
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// `P M P` with `P` projecting onto photon numbers `≤ keep`.
    pub fn project_interior(&self, keep: usize) -> OperatorMatrix {
        let cut = (2 * (keep + 1)).min(self.space.dim());
        let mut entries = DMatrix::zeros(self.space.dim(), self.space.dim());
        entries
            .view_mut((0, 0), (cut, cut))
            .copy_from(&self.entries.view((0, 0), (cut, cut)));
        OperatorMatrix {
            space: self.space,
            entries,
            hermitian: self.hermitian,
        }
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }

    /// Real diagonal, when the operator is diagonal with real entries.
    pub fn real_diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// Arithmetic between operators on the same space. Mixing spaces is a
// programming error and panics; use `commutator` for the checked form.
impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            space: self.space,
            entries: &self.entries * &rhs.entries,
            hermitian: false,
        }
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            space: self.space,
            entries: &self.entries + &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            space: self.space,
            entries: &self.entries - &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

/// Field annihilation and creation operators `(a, a†)`.
pub fn fock_operators(space: HilbertSpace) -> (OperatorMatrix, OperatorMatrix) {
    let dim = space.dim();
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..=space.n_max() {
        let amp = real((n as f64).sqrt());
        for atom in [Atom::Ground, Atom::Excited] {
            let from = 2 * n + atom.offset();
            let to = 2 * (n - 1) + atom.offset();
            a[(to, from)] = amp;
        }
    }
    let a = OperatorMatrix {
        space,
        entries: a,
        hermitian: false,
    };
    let a_dag = a.adjoint();
    (a, a_dag)
}

/// Qubit operators `(s_z, s₋, s₊)` with `s_z = σ_z / 2`.
pub fn qubit_operators(space: HilbertSpace) -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let s_z = OperatorMatrix::from_diagonal(space, |atom, _| match atom {
        Atom::Excited => real(0.5),
        Atom::Ground => real(-0.5),
    });
    let dim = space.dim();
    let mut s_plus = DMatrix::zeros(dim, dim);
    for n in 0..=space.n_max() {
        s_plus[(2 * n + 1, 2 * n)] = ONE;
    }
    let s_plus = OperatorMatrix {
        space,
        entries: s_plus,
        hermitian: false,
    };
    let s_minus = s_plus.adjoint();
    (s_z, s_minus, s_plus)
}

/// `AB - BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.space.check_same(&b.space)?;
    Ok(OperatorMatrix {
        space: a.space,
        entries: &a.entries * &b.entries - &b.entries * &a.entries,
        hermitian: false,
    })
}

/// `⟨ψ|O|ψ⟩` for hermitian `O`.
pub fn expectation(psi: &StateVector, op: &OperatorMatrix) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(QrmError::NotHermitian {
            deviation: op.hermiticity_deviation(),
        });
    }
    let value = psi.inner(&op.apply(psi)?)?;
    if value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(QrmError::NumericConsistency { imag: value.im });
    }
    Ok(value.re)
}

/// Spectral decomposition of a hermitian generator, reused for every time
/// point: `exp(-iHt) = V exp(-iΛt) V†`.
#[derive(Clone, Debug)]
pub struct Propagator {
    space: HilbertSpace,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let deviation = h.hermiticity_deviation();
        if !h.is_hermitian() || deviation > HERMITIAN_TOL {
            return Err(QrmError::NotHermitian { deviation });
        }
        let eig = h.entries.clone().symmetric_eigen();
        Ok(Propagator {
            space: h.space,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Expansion coefficients `V†ψ₀`, for repeated evaluation at many times.
    pub fn expand(&self, psi0: &StateVector) -> Result<Expansion<'_>> {
        self.space.check_same(&psi0.space)?;
        Ok(Expansion {
            propagator: self,
            coeffs: self.eigenvectors.adjoint() * &psi0.amps,
        })
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        Ok(self.expand(psi0)?.at(t))
    }

    pub fn evolve_series(
        &self,
        psi0: &StateVector,
        times: &[f64],
        exec: Execution,
    ) -> Result<Vec<StateVector>> {
        let expansion = self.expand(psi0)?;
        Ok(exec.map(times, |&t| expansion.at(t)))
    }

    /// Full propagator matrix `exp(-iHt)`.
    pub fn unitary(&self, t: f64) -> OperatorMatrix {
        let phases = self.phases(t);
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        OperatorMatrix {
            space: self.space,
            entries: scaled * self.eigenvectors.adjoint(),
            hermitian: false,
        }
    }

    fn phases(&self, t: f64) -> DVector<C64> {
        self.eigenvalues.map(|e| C64::from_polar(1.0, -e * t))
    }
}

pub struct Expansion<'a> {
    propagator: &'a Propagator,
    coeffs: DVector<C64>,
}

impl Expansion<'_> {
    pub fn at(&self, t: f64) -> StateVector {
        let phased = self.coeffs.component_mul(&self.propagator.phases(t));
        StateVector {
            space: self.propagator.space,
            amps: &self.propagator.eigenvectors * phased,
        }
    }
}

/// `exp(-iHt)ψ₀` (ħ = 1).
pub fn evolve_with(h: &OperatorMatrix, psi0: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(h)?.evolve(psi0, t)
}
