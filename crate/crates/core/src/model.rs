//! Quantum Rabi model operators and their rotating / counter-rotating
//! decomposition.
//!
//! The anti-normal number operator `N̄ = a a† + s₋s₊` is assembled as
//! `a†a + 1 + s₋s₊`. In the truncated space the literal product `a a†` is
//! wrong on the top photon level, while the algebraic form keeps the
//! decomposition `H_R = (H + H̄)/2` and the parity identities exact.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QrmError, Result};
use crate::hilbert::{fock_operators, qubit_operators, real, HilbertSpace, OperatorMatrix, C64};

/// Physical frequencies (ħ = 1, angular units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    g: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(QrmError::InvalidParams(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(QrmError::InvalidParams(format!(
                "omega0 must be >= 0, got {omega0}"
            )));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(QrmError::InvalidParams(format!("g must be > 0, got {g}")));
        }
        Ok(ModelParams { omega, omega0, g })
    }

    /// From `ξ = δ/2g`, `ε = ω/g` and the coupling `g`.
    pub fn from_dimensionless(xi: f64, epsilon: f64, g: f64) -> Result<Self> {
        let omega = epsilon * g;
        let delta = 2.0 * xi * g;
        ModelParams::new(omega, delta + omega, g)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Red-sideband detuning `ω₀ - ω`.
    pub fn delta(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// Blue-sideband detuning, `δ + 2ω`.
    pub fn delta_bar(&self) -> f64 {
        self.delta() + 2.0 * self.omega
    }

    pub fn xi(&self) -> f64 {
        self.delta() / (2.0 * self.g)
    }

    pub fn epsilon(&self) -> f64 {
        self.omega / self.g
    }
}

/// Single-mode and qubit building blocks on one space.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub s_z: OperatorMatrix,
    pub s_minus: OperatorMatrix,
    pub s_plus: OperatorMatrix,
    pub identity: OperatorMatrix,
}

impl Ladder {
    pub fn new(space: HilbertSpace) -> Self {
        let (a, a_dag) = fock_operators(space);
        let (s_z, s_minus, s_plus) = qubit_operators(space);
        Ladder {
            a,
            a_dag,
            s_z,
            s_minus,
            s_plus,
            identity: OperatorMatrix::identity(space),
        }
    }

    /// `a†a`, set directly on the diagonal so its entries are exact integers.
    pub fn photon_number(&self) -> OperatorMatrix {
        OperatorMatrix::from_diagonal(self.a.space(), |_, n| real(n as f64))
    }

    /// `s₊s₋`, the excited-state projector.
    pub fn excited_projector(&self) -> OperatorMatrix {
        (&self.s_plus * &self.s_minus).assume_hermitian()
    }

    /// `s₋s₊`, the ground-state projector.
    pub fn ground_projector(&self) -> OperatorMatrix {
        (&self.s_minus * &self.s_plus).assume_hermitian()
    }

    /// Rotating coupling `a s₊ + a† s₋`.
    pub fn rotating_coupling(&self) -> OperatorMatrix {
        (&(&self.a * &self.s_plus) + &(&self.a_dag * &self.s_minus)).assume_hermitian()
    }

    /// Counter-rotating coupling `a s₋ + a† s₊`.
    pub fn counter_rotating_coupling(&self) -> OperatorMatrix {
        (&(&self.a * &self.s_minus) + &(&self.a_dag * &self.s_plus)).assume_hermitian()
    }
}

fn lin(terms: &[(f64, &OperatorMatrix)]) -> OperatorMatrix {
    let space = terms[0].1.space();
    let mut acc = OperatorMatrix::zeros(space);
    for (coef, op) in terms {
        acc = &acc + &op.scaled(real(*coef));
    }
    acc
}

/// Full Rabi Hamiltonian `ω(a†a + ½) + ω₀ s_z + g(a + a†)(s₋ + s₊)`.
pub fn build_rabi(params: &ModelParams, space: HilbertSpace) -> OperatorMatrix {
    let l = Ladder::new(space);
    let field = &l.a + &l.a_dag;
    let sigma_x = &l.s_minus + &l.s_plus;
    let coupling = (&field * &sigma_x).assume_hermitian();
    lin(&[
        (params.omega, &l.photon_number()),
        (0.5 * params.omega, &l.identity),
        (params.omega0, &l.s_z),
        (params.g, &coupling),
    ])
    .assume_hermitian()
}

/// `(N̂, N̄)`: `N̂ = a†a + s₊s₋`, `N̄ = a†a + 1 + s₋s₊`.
pub fn build_number_ops(space: HilbertSpace) -> (OperatorMatrix, OperatorMatrix) {
    let l = Ladder::new(space);
    let photons = l.photon_number();
    let n_jc = &photons + &l.excited_projector();
    let n_ajc = &(&photons + &l.identity) + &l.ground_projector();
    (n_jc, n_ajc)
}

/// Anti-normal number operator from the literal product `a a† + s₋s₊`.
/// Differs from the algebraic form on the top photon level.
pub fn n_ajc_product_form(space: HilbertSpace) -> OperatorMatrix {
    let l = Ladder::new(space);
    (&(&l.a * &l.a_dag) + &l.ground_projector()).assume_hermitian()
}

/// JC and AJC components `(H, H̄)` with `H_R = (H + H̄)/2`.
pub fn build_components(
    params: &ModelParams,
    space: HilbertSpace,
) -> (OperatorMatrix, OperatorMatrix) {
    let l = Ladder::new(space);
    let (n_jc, n_ajc) = build_number_ops(space);
    let w = params.omega;
    let h = lin(&[
        (w, &n_jc),
        (params.delta(), &l.s_z),
        (2.0 * params.g, &l.rotating_coupling()),
        (-0.5 * w, &l.identity),
    ]);
    let h_bar = lin(&[
        (w, &n_ajc),
        (params.delta_bar(), &l.s_z),
        (2.0 * params.g, &l.counter_rotating_coupling()),
        (-0.5 * w, &l.identity),
    ]);
    (h, h_bar)
}

/// Transition operators `(Â, Ā)`: `Â = δ s_z + g(a s₊ + a† s₋)`,
/// `Ā = δ̄ s_z + g(a s₋ + a† s₊)`.
pub fn build_transition_ops(
    params: &ModelParams,
    space: HilbertSpace,
) -> (OperatorMatrix, OperatorMatrix) {
    let l = Ladder::new(space);
    let a_jc = lin(&[(params.delta(), &l.s_z), (params.g, &l.rotating_coupling())]);
    let a_ajc = lin(&[
        (params.delta_bar(), &l.s_z),
        (params.g, &l.counter_rotating_coupling()),
    ]);
    (a_jc, a_ajc)
}

/// Effective frame Hamiltonians `(H_JC, H̄_AJC)`:
/// `H_JC = ωN̂ + Â`, `H̄_AJC = ω(N̄ - 1) + Ā`.
pub fn build_effective(
    params: &ModelParams,
    space: HilbertSpace,
) -> (OperatorMatrix, OperatorMatrix) {
    let (n_jc, n_ajc) = build_number_ops(space);
    let (a_jc, a_ajc) = build_transition_ops(params, space);
    let id = OperatorMatrix::identity(space);
    let w = params.omega;
    let h_jc = lin(&[(w, &n_jc), (1.0, &a_jc)]);
    let h_ajc = lin(&[(w, &n_ajc), (-w, &id), (1.0, &a_ajc)]);
    (h_jc, h_ajc)
}

/// `exp(coeff · D)` for a diagonal operator `D`.
pub fn exp_diagonal(op: &OperatorMatrix, coeff: C64) -> OperatorMatrix {
    let dim = op.space().dim();
    let diag = op.entries().diagonal().map(|d| (coeff * d).exp());
    debug_assert!({
        let mut off = op.entries().clone();
        off.fill_diagonal(C64::new(0.0, 0.0));
        off.iter().all(|z| z.norm() == 0.0)
    });
    let mut m = DMatrix::zeros(dim, dim);
    m.set_diagonal(&diag);
    OperatorMatrix::new(op.space(), m).expect("same space")
}

/// Parity `Π_k = exp(-ikπ N̂)`.
pub fn build_parity(space: HilbertSpace, k: u32) -> Result<OperatorMatrix> {
    if k == 0 {
        return Err(QrmError::InvalidParams(
            "parity power k must be >= 1".into(),
        ));
    }
    let (n_jc, _) = build_number_ops(space);
    Ok(parity_of(&n_jc, k))
}

/// `exp(-ikπ N)` for either number operator.
pub fn parity_of(number_op: &OperatorMatrix, k: u32) -> OperatorMatrix {
    let p = exp_diagonal(number_op, C64::new(0.0, -(k as f64) * PI));
    // Entries are ±1 up to the rounding of the phase.
    let dev = p.hermiticity_deviation();
    if dev <= crate::hilbert::HERMITIAN_TOL {
        p.assume_hermitian()
    } else {
        p
    }
}

/// `V† M V`.
pub(crate) fn conjugate(m: &OperatorMatrix, v: &OperatorMatrix) -> OperatorMatrix {
    &(&v.adjoint() * m) * v
}

/// Largest entrywise deviation of the two frame transformations of `H_R`
/// from their closed forms at time `t`:
///
/// * `U₀†H_R U₀ = H_JC + g(e^{-2iωt} a s₋ + e^{2iωt} a† s₊)`, `U₀ = e^{-iωtN̂}`
/// * `Ū₀†H_R Ū₀ = H̄_AJC + g(e^{-2iωt} a s₊ + e^{2iωt} a† s₋)`, `Ū₀ = e^{-iωtN̄}`
pub fn frame_conjugation_check(params: &ModelParams, space: HilbertSpace, t: f64) -> f64 {
    let l = Ladder::new(space);
    let h_r = build_rabi(params, space);
    let (n_jc, n_ajc) = build_number_ops(space);
    let (h_jc, h_ajc) = build_effective(params, space);
    let wt = params.omega * t;
    let down = C64::from_polar(params.g, -2.0 * wt);
    let up = C64::from_polar(params.g, 2.0 * wt);

    let u0 = exp_diagonal(&n_jc, C64::new(0.0, -wt));
    let rf = conjugate(&h_r, &u0);
    let rf_expected =
        &(&h_jc + &(&l.a * &l.s_minus).scaled(down)) + &(&l.a_dag * &l.s_plus).scaled(up);

    let u0_bar = exp_diagonal(&n_ajc, C64::new(0.0, -wt));
    let crf = conjugate(&h_r, &u0_bar);
    let crf_expected =
        &(&h_ajc + &(&l.a * &l.s_plus).scaled(down)) + &(&l.a_dag * &l.s_minus).scaled(up);

    let d_rf = rf.max_abs_diff(&rf_expected).expect("same space");
    let d_crf = crf.max_abs_diff(&crf_expected).expect("same space");
    d_rf.max(d_crf)
}
