#![allow(dead_code)]

use proptest::prelude::*;

use qrm_core::analytic::{self, ajc_branch, ajc_eigenstate, jc_branch, jc_eigenstate, Frame, Sign};
use qrm_core::hilbert::{Atom, HilbertSpace, StateVector};
use qrm_core::model::{build_number_ops, ModelParams};
use qrm_core::oracle;
use qrm_core::verify::unitarity_deviation;
use qrm_core::QrmError;

pub const PROPERTY_TOL: f64 = 1e-12;

/// One randomized draw. `xi` is kept above `-epsilon/2` so that `ω₀ ≥ 0`.
#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub xi: f64,
    pub epsilon: f64,
    pub n: usize,
    pub t: f64,
}

impl Draw {
    pub fn params(&self) -> ModelParams {
        ModelParams::from_dimensionless(self.xi, self.epsilon, 1.0).expect("draw is valid")
    }
}

pub fn draws() -> impl Strategy<Value = Draw> {
    (1e-3f64..=2.0, 0.0f64..=1.0, 0usize..=10, 0.0f64..50.0).prop_map(|(epsilon, u, n, t)| {
        let lo = (-2.0f64).max(-epsilon / 2.0);
        Draw {
            xi: lo + u * (2.0 - lo),
            epsilon,
            n,
            t,
        }
    })
}

fn check(name: &str, value: f64, tol: f64) -> Result<(), TestCaseError> {
    if value <= tol && value.is_finite() {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{name}: {value:e} > {tol:e}")))
    }
}

fn lift<T>(r: qrm_core::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn space_for(n: usize) -> HilbertSpace {
    HilbertSpace::new(n + 4)
}

pub fn normalization(d: &Draw) -> Result<(), TestCaseError> {
    let p = d.params();
    let space = space_for(d.n);
    for frame in [Frame::Rf, Frame::Crf] {
        let psi = lift(analytic::evolve(&p, space, frame, d.n, d.t))?;
        check("closed-form norm", (psi.norm() - 1.0).abs(), PROPERTY_TOL)?;
    }
    Ok(())
}

pub fn unitarity(d: &Draw) -> Result<(), TestCaseError> {
    let p = d.params();
    let space = space_for(d.n);
    for frame in [Frame::Rf, Frame::Crf] {
        let h = oracle::frame_hamiltonian(&p, space, frame);
        check(
            "U^dag U - I",
            lift(unitarity_deviation(&h, d.t))?,
            PROPERTY_TOL,
        )?;
        let a = lift(analytic::initial_state(&p, space, frame, d.n))?;
        let b = lift(analytic::evolve(&p, space, frame, d.n, d.t))?;
        let overlap_0 = lift(a.inner(&a))?;
        let overlap_t = lift(b.inner(&b))?;
        check("norm drift", (overlap_0 - overlap_t).norm(), PROPERTY_TOL)?;
    }
    Ok(())
}

fn orthonormal_pair(plus: &StateVector, minus: &StateVector) -> Result<f64, TestCaseError> {
    let cross = lift(plus.inner(minus))?.norm();
    Ok(cross
        .max((plus.norm() - 1.0).abs())
        .max((minus.norm() - 1.0).abs()))
}

pub fn orthonormalization(d: &Draw) -> Result<(), TestCaseError> {
    if d.n == 0 {
        return Ok(());
    }
    let p = d.params();
    let space = space_for(d.n);
    let (jp, _) = lift(jc_eigenstate(&p, space, d.n, Sign::Plus))?;
    let (jm, _) = lift(jc_eigenstate(&p, space, d.n, Sign::Minus))?;
    check("JC eigenpair", orthonormal_pair(&jp, &jm)?, PROPERTY_TOL)?;
    let (ap, _) = lift(ajc_eigenstate(&p, space, d.n, Sign::Plus))?;
    let (am, _) = lift(ajc_eigenstate(&p, space, d.n, Sign::Minus))?;
    check("AJC eigenpair", orthonormal_pair(&ap, &am)?, PROPERTY_TOL)
}

pub fn dressing_unit_circle(d: &Draw) -> Result<(), TestCaseError> {
    let p = d.params();
    for n in [d.n, d.n + 1] {
        for atom in [Atom::Ground, Atom::Excited] {
            for branch in [jc_branch(&p, atom, n), ajc_branch(&p, atom, n)] {
                match branch {
                    Ok(b) => check(
                        "c^2 + s^2 - 1",
                        (b.c * b.c + b.s * b.s - 1.0).abs(),
                        PROPERTY_TOL,
                    )?,
                    Err(QrmError::DegenerateBranch { .. }) | Err(QrmError::NullState(_)) => {}
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }
    }
    Ok(())
}

pub fn number_eigenvalues(d: &Draw) -> Result<(), TestCaseError> {
    if d.n == 0 {
        return Ok(());
    }
    let p = d.params();
    let space = space_for(d.n);
    let (n_jc, n_ajc) = build_number_ops(space);
    for sign in [Sign::Plus, Sign::Minus] {
        let (psi, _) = lift(jc_eigenstate(&p, space, d.n, sign))?;
        let dev = lift(lift(n_jc.apply(&psi))?.max_abs_diff(&psi.scaled((d.n as f64).into())))?;
        check("N psi_gn - n psi_gn", dev, PROPERTY_TOL)?;
        let (psi, _) = lift(ajc_eigenstate(&p, space, d.n, sign))?;
        let dev =
            lift(lift(n_ajc.apply(&psi))?.max_abs_diff(&psi.scaled((d.n as f64 + 1.0).into())))?;
        check("Nbar psi_en - (n+1) psi_en", dev, PROPERTY_TOL)?;
    }
    Ok(())
}

pub fn all_properties(d: &Draw) -> Result<(), TestCaseError> {
    normalization(d)?;
    unitarity(d)?;
    orthonormalization(d)?;
    dressing_unit_circle(d)?;
    number_eigenvalues(d)
}
