//! Closed-form dynamics in the rotating frame (RF, generator `H_JC`) and the
//! counter-rotating frame (CRF, generator `H̄_AJC`).
//!
//! Every bare state `|a, n⟩` belongs to exactly one two-level doublet of each
//! transition operator. A doublet is described by [`BranchCoeffs`]: the Rabi
//! frequency `R` and dressing pair `(c, s)` with
//!
//! ```text
//! T |ψ⟩ = R |φ⟩,   T |φ⟩ = R |ψ⟩,   |φ⟩ = ±c |ψ⟩ + s |ψ'⟩
//! ```
//!
//! where `T` is `Â` (JC families) or `Ā` (AJC families), `ψ'` is the doublet
//! partner and the sign is `+` for an excited bare state and `-` for a ground
//! one. Under `T` alone the bare state evolves as
//! `cos(Rt)|ψ⟩ - i sin(Rt)|φ⟩`.
//!
//! The RF initial state is the AJC eigenstate `|Ψ̄⁺_{en}⟩`, a superposition of
//! `|e,n⟩` and `|g,n-1⟩`; the CRF initial state is the JC eigenstate
//! `|Ψ⁻_{gn}⟩`, a superposition of `|g,n⟩` and `|e,n-1⟩`. Each component sits
//! in its own doublet of the driving transition operator, so the evolved state
//! is a weighted sum of two independent Rabi oscillations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QrmError, Result};
use crate::hilbert::{basis_state, real, Atom, HilbertSpace, StateVector, C64};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Rf,
    Crf,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Rf => "rf",
            Frame::Crf => "crf",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Frame {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rf" => Ok(Frame::Rf),
            "crf" => Ok(Frame::Crf),
            other => Err(format!("unknown frame `{other}` (expected rf or crf)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which transition operator a doublet belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    Jc,
    Ajc,
}

/// Doublet label: transition operator plus the bare state it starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub coupling: Coupling,
    pub atom: Atom,
    pub n: usize,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.coupling {
            Coupling::Jc => "JC",
            Coupling::Ajc => "AJC",
        };
        write!(f, "{c}-{}({})", self.atom, self.n)
    }
}

impl Family {
    /// Doublet partner of the bare state, `None` below the vacuum.
    pub fn partner(&self) -> Option<(Atom, usize)> {
        match (self.coupling, self.atom) {
            (Coupling::Jc, Atom::Excited) => Some((Atom::Ground, self.n + 1)),
            (Coupling::Jc, Atom::Ground) => self.n.checked_sub(1).map(|m| (Atom::Excited, m)),
            (Coupling::Ajc, Atom::Excited) => self.n.checked_sub(1).map(|m| (Atom::Ground, m)),
            (Coupling::Ajc, Atom::Ground) => Some((Atom::Excited, self.n + 1)),
        }
    }

    /// Photon factor `k` in `R = g sqrt(k + x²)`, with `s = g sqrt(k) / R`.
    fn photon_factor(&self) -> usize {
        match self.partner() {
            Some((_, m)) => self.n.max(m),
            None => 0,
        }
    }

    fn sign(&self) -> f64 {
        match self.atom {
            Atom::Excited => 1.0,
            Atom::Ground => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchCoeffs {
    pub family: Family,
    pub rabi: f64,
    pub c: f64,
    pub s: f64,
}

impl BranchCoeffs {
    /// Doublet with vanishing Rabi frequency: the bare state is a null vector
    /// of the transition operator and never moves.
    fn null(family: Family) -> Self {
        BranchCoeffs {
            family,
            rabi: 0.0,
            c: 0.0,
            s: 0.0,
        }
    }

    /// Transition state `|φ⟩ = ±c|ψ⟩ + s|ψ'⟩`.
    pub fn transition_state(&self, space: HilbertSpace) -> Result<StateVector> {
        let f = self.family;
        let mut phi = StateVector::zero(space);
        phi.add_to(f.atom, f.n, real(f.sign() * self.c))?;
        if let Some((atom, m)) = f.partner() {
            if self.s != 0.0 {
                phi.add_to(atom, m, real(self.s))?;
            }
        }
        Ok(phi)
    }

    /// `cos(Rt)|ψ⟩ - i sin(Rt)|φ⟩` as amplitude pairs on (bare, partner).
    fn rotate(&self, t: f64) -> (C64, C64) {
        let (sin, cos) = (self.rabi * t).sin_cos();
        let bare = C64::new(cos, -self.family.sign() * self.c * sin);
        let partner = C64::new(0.0, -self.s * sin);
        (bare, partner)
    }

    /// Evolved bare state `e^{-iθt}(cos(Rt)|ψ⟩ - i sin(Rt)|φ⟩)`.
    fn evolve_bare(&self, space: HilbertSpace, phase_rate: f64, t: f64) -> Result<StateVector> {
        let f = self.family;
        let phase = C64::from_polar(1.0, -phase_rate * t);
        let (bare, partner) = self.rotate(t);
        let mut psi = StateVector::zero(space);
        psi.add_to(f.atom, f.n, phase * bare)?;
        if let Some((atom, m)) = f.partner() {
            if self.s != 0.0 {
                psi.add_to(atom, m, phase * partner)?;
            }
        }
        Ok(psi)
    }
}

fn branch(family: Family, half_detuning_over_g: f64, detuning: f64, g: f64) -> BranchCoeffs {
    let k = family.photon_factor() as f64;
    let rabi = g * (k + half_detuning_over_g * half_detuning_over_g).sqrt();
    BranchCoeffs {
        family,
        rabi,
        c: detuning / (2.0 * rabi),
        s: g * k.sqrt() / rabi,
    }
}

/// JC doublet of `|atom, n⟩`.
///
/// `e(n)`: `R = g sqrt((n+1) + ξ²)`, `c = δ/2R`, `s = g sqrt(n+1)/R`.
/// `g(n)`: `R = g sqrt(n + ξ²)`, `c = δ/2R`, `s = g sqrt(n)/R`.
///
/// `g(0)` on resonance has `R = 0`; that case is reported as
/// [`QrmError::DegenerateBranch`] (the state `|g,0⟩` is a null vector of `Â`).
pub fn jc_branch(params: &ModelParams, atom: Atom, n: usize) -> Result<BranchCoeffs> {
    let family = Family {
        coupling: Coupling::Jc,
        atom,
        n,
    };
    let b = branch(family, params.xi(), params.delta(), params.g());
    if b.rabi == 0.0 {
        return Err(QrmError::DegenerateBranch {
            family: family.to_string(),
        });
    }
    Ok(b)
}

/// AJC doublet of `|atom, n⟩`.
///
/// `e(n)`: `R̄ = g sqrt(n + (ξ+ε)²)`, `c̄ = δ̄/2R̄`, `s̄ = g sqrt(n)/R̄`.
/// `g(n)`: `R̄ = g sqrt((n+1) + (ξ+ε)²)`, `c̄ = δ̄/2R̄`, `s̄ = g sqrt(n+1)/R̄`.
pub fn ajc_branch(params: &ModelParams, atom: Atom, n: usize) -> Result<BranchCoeffs> {
    let family = Family {
        coupling: Coupling::Ajc,
        atom,
        n,
    };
    let x = params.delta_bar() / (2.0 * params.g());
    let b = branch(family, x, params.delta_bar(), params.g());
    // δ̄ = ω₀ + ω > 0 for validated parameters
    assert!(b.rabi > 0.0, "AJC Rabi frequency vanished for {family}");
    Ok(b)
}

/// Doublet used for propagation; a vanishing Rabi frequency is a stationary
/// doublet rather than an error.
fn jc_doublet(params: &ModelParams, atom: Atom, n: usize) -> BranchCoeffs {
    let family = Family {
        coupling: Coupling::Jc,
        atom,
        n,
    };
    jc_branch(params, atom, n).unwrap_or_else(|_| BranchCoeffs::null(family))
}

fn ajc_doublet(params: &ModelParams, atom: Atom, n: usize) -> BranchCoeffs {
    ajc_branch(params, atom, n).expect("AJC branch is never degenerate")
}

/// Dressing `(c̄, s̄)` of the RF initial state `|Ψ̄⁺_{en}⟩`. At `n = 0` this is
/// exactly `(1, 0)`: the state is `|e,0⟩`.
fn rf_dressing(params: &ModelParams, n: usize) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let b = ajc_doublet(params, Atom::Excited, n);
    (b.c, b.s)
}

/// Dressing `(c, s)` of the CRF initial state `|Ψ⁻_{gn}⟩`. At `n = 0` the
/// state is `|g,0⟩` whatever the sign of `δ`, so the pair is `(1, 0)`.
fn crf_dressing(params: &ModelParams, n: usize) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let b = jc_doublet(params, Atom::Ground, n);
    (b.c, b.s)
}

/// Normalized AJC eigenstate `|Ψ̄^±_{en}⟩` and its energy `ωn ± R̄_{en}`.
pub fn ajc_eigenstate(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    sign: Sign,
) -> Result<(StateVector, f64)> {
    if n + 1 > space.n_max() {
        return Err(QrmError::Truncation {
            needed: n + 1,
            n_max: space.n_max(),
        });
    }
    if n == 0 {
        return match sign {
            Sign::Plus => Ok((
                basis_state(space, Atom::Excited, 0)?,
                0.5 * (params.omega0() + params.omega()),
            )),
            Sign::Minus => Err(QrmError::NullState(
                "AJC eigenstate e(0) with minus sign is the zero vector".into(),
            )),
        };
    }
    let b = ajc_doublet(params, Atom::Excited, n);
    let mut psi = StateVector::zero(space);
    let (weight_e, weight_g, energy) = match sign {
        Sign::Plus => {
            let norm = (2.0 * (1.0 + b.c)).sqrt();
            (
                (1.0 + b.c) / norm,
                b.s / norm,
                params.omega() * n as f64 + b.rabi,
            )
        }
        Sign::Minus => {
            let norm = (2.0 * (1.0 - b.c)).sqrt();
            (
                (1.0 - b.c) / norm,
                -b.s / norm,
                params.omega() * n as f64 - b.rabi,
            )
        }
    };
    psi.add_to(Atom::Excited, n, real(weight_e))?;
    psi.add_to(Atom::Ground, n - 1, real(weight_g))?;
    Ok((psi, energy))
}

/// Normalized JC eigenstate `|Ψ^±_{gn}⟩` and its energy `ωn ± R_{gn}`.
///
/// At `n = 0` the minus label returns `|g,0⟩` with energy `-(ω₀ - ω)/2`
/// regardless of the sign of `δ`, and the plus label is the zero vector.
pub fn jc_eigenstate(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    sign: Sign,
) -> Result<(StateVector, f64)> {
    if n > space.n_max() {
        return Err(QrmError::Truncation {
            needed: n,
            n_max: space.n_max(),
        });
    }
    if n == 0 {
        return match sign {
            Sign::Minus => Ok((
                basis_state(space, Atom::Ground, 0)?,
                -0.5 * (params.omega0() - params.omega()),
            )),
            Sign::Plus => Err(QrmError::NullState(
                "JC eigenstate g(0) with plus sign is the zero vector".into(),
            )),
        };
    }
    let b = jc_doublet(params, Atom::Ground, n);
    let mut psi = StateVector::zero(space);
    let (weight_g, weight_e, energy) = match sign {
        Sign::Minus => {
            let norm = (2.0 * (1.0 + b.c)).sqrt();
            (
                (1.0 + b.c) / norm,
                -b.s / norm,
                params.omega() * n as f64 - b.rabi,
            )
        }
        Sign::Plus => {
            let norm = (2.0 * (1.0 - b.c)).sqrt();
            (
                (1.0 - b.c) / norm,
                b.s / norm,
                params.omega() * n as f64 + b.rabi,
            )
        }
    };
    psi.add_to(Atom::Ground, n, real(weight_g))?;
    psi.add_to(Atom::Excited, n - 1, real(weight_e))?;
    Ok((psi, energy))
}

fn check_support(space: HilbertSpace, n: usize) -> Result<()> {
    if n + 2 > space.n_max() {
        return Err(QrmError::Truncation {
            needed: n + 2,
            n_max: space.n_max(),
        });
    }
    Ok(())
}

/// The two normalized branch evolutions making up an RF state, before
/// weighting: `(|Ψ_{en}(t)⟩, |Ψ_{g,n-1}(t)⟩)`. The second is absent at `n = 0`.
pub fn rf_branches(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    t: f64,
) -> Result<(StateVector, Option<StateVector>)> {
    check_support(space, n)?;
    let w = params.omega();
    let upper = jc_doublet(params, Atom::Excited, n).evolve_bare(space, w * (n as f64 + 1.0), t)?;
    let lower = match n.checked_sub(1) {
        Some(m) => Some(jc_doublet(params, Atom::Ground, m).evolve_bare(space, w * m as f64, t)?),
        None => None,
    };
    Ok((upper, lower))
}

/// CRF counterpart of [`rf_branches`]: `(|Ψ̄_{gn}(t)⟩, |Ψ̄_{e,n-1}(t)⟩)`.
pub fn crf_branches(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    t: f64,
) -> Result<(StateVector, Option<StateVector>)> {
    check_support(space, n)?;
    let w = params.omega();
    let upper = ajc_doublet(params, Atom::Ground, n).evolve_bare(space, w * (n as f64 + 1.0), t)?;
    let lower = match n.checked_sub(1) {
        Some(m) => {
            Some(ajc_doublet(params, Atom::Excited, m).evolve_bare(space, w * m as f64, t)?)
        }
        None => None,
    };
    Ok((upper, lower))
}

fn combine(
    main: StateVector,
    side: Option<StateVector>,
    main_weight: f64,
    side_weight: f64,
) -> Result<StateVector> {
    let psi = main.scaled(real(main_weight));
    match side {
        Some(side) if side_weight != 0.0 => psi.plus(&side.scaled(real(side_weight))),
        _ => Ok(psi),
    }
}

/// `U_JC(t)|Ψ̄⁺_{en}⟩` in closed form.
pub fn evolve_rf(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    t: f64,
) -> Result<StateVector> {
    let (c, s) = rf_dressing(params, n);
    let norm = (2.0 * (1.0 + c)).sqrt();
    let (main, side) = rf_branches(params, space, n, t)?;
    combine(main, side, (1.0 + c) / norm, s / norm)
}

/// `Ū_AJC(t)|Ψ⁻_{gn}⟩` in closed form.
pub fn evolve_crf(
    params: &ModelParams,
    space: HilbertSpace,
    n: usize,
    t: f64,
) -> Result<StateVector> {
    let (c, s) = crf_dressing(params, n);
    let norm = (2.0 * (1.0 + c)).sqrt();
    let (main, side) = crf_branches(params, space, n, t)?;
    combine(main, side, (1.0 + c) / norm, -s / norm)
}

/// Closed-form initial state of a frame: `|Ψ̄⁺_{en}⟩` (RF) or `|Ψ⁻_{gn}⟩` (CRF).
pub fn initial_state(
    params: &ModelParams,
    space: HilbertSpace,
    frame: Frame,
    n: usize,
) -> Result<StateVector> {
    match frame {
        Frame::Rf => evolve_rf(params, space, n, 0.0),
        Frame::Crf => evolve_crf(params, space, n, 0.0),
    }
}

pub fn evolve(
    params: &ModelParams,
    space: HilbertSpace,
    frame: Frame,
    n: usize,
    t: f64,
) -> Result<StateVector> {
    match frame {
        Frame::Rf => evolve_rf(params, space, n, t),
        Frame::Crf => evolve_crf(params, space, n, t),
    }
}

/// The five tracked expectation values. RF reports normal-order quantities
/// (`⟨s₊s₋⟩`, `⟨a†a⟩`), CRF anti-normal ones (`⟨s₋s₊⟩`, `⟨aa†⟩`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub s_z: f64,
    pub atomic_excitation: f64,
    pub photon: f64,
    pub n_jc: f64,
    pub n_ajc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    SZ,
    AtomicExcitation,
    Photon,
    NJc,
    NAjc,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::SZ,
        Observable::AtomicExcitation,
        Observable::Photon,
        Observable::NJc,
        Observable::NAjc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::SZ => "s_z",
            Observable::AtomicExcitation => "atomic_excitation",
            Observable::Photon => "photon",
            Observable::NJc => "n_jc",
            Observable::NAjc => "n_ajc",
        }
    }

    pub fn parse(name: &str) -> Result<Observable> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| QrmError::UnknownColumn(name.to_string()))
    }
}

impl Observables {
    pub fn get(&self, which: Observable) -> f64 {
        match which {
            Observable::SZ => self.s_z,
            Observable::AtomicExcitation => self.atomic_excitation,
            Observable::Photon => self.photon,
            Observable::NJc => self.n_jc,
            Observable::NAjc => self.n_ajc,
        }
    }

    pub fn max_abs_diff(&self, other: &Observables) -> f64 {
        Observable::ALL
            .into_iter()
            .map(|o| (self.get(o) - other.get(o)).abs())
            .fold(0.0, f64::max)
    }
}

fn oscillation(b: &BranchCoeffs, t: f64) -> f64 {
    let sin = (b.rabi * t).sin();
    1.0 - 2.0 * b.s * b.s * sin * sin
}

/// RF observables in `U_JC(t)|Ψ̄⁺_{en}⟩`; `n_jc` is time independent.
pub fn observables_rf(params: &ModelParams, n: usize, t: f64) -> Observables {
    let (c, s) = rf_dressing(params, n);
    let upper = jc_doublet(params, Atom::Excited, n);
    let lower_term = match n.checked_sub(1) {
        Some(m) => s * s * oscillation(&jc_doublet(params, Atom::Ground, m), t),
        None => 0.0,
    };
    let s_z = ((1.0 + c) * (1.0 + c) * oscillation(&upper, t) - lower_term) / (4.0 * (1.0 + c));
    let depletion = s * s / (1.0 + c);
    let n = n as f64;
    Observables {
        s_z,
        atomic_excitation: 0.5 + s_z,
        photon: n + 0.5 - depletion - s_z,
        n_jc: n + 1.0 - depletion,
        n_ajc: n - depletion + 2.0 * (1.0 - s_z),
    }
}

/// CRF observables in `Ū_AJC(t)|Ψ⁻_{gn}⟩`; `n_ajc` is time independent.
pub fn observables_crf(params: &ModelParams, n: usize, t: f64) -> Observables {
    let (c, s) = crf_dressing(params, n);
    let upper = ajc_doublet(params, Atom::Ground, n);
    let lower_term = match n.checked_sub(1) {
        Some(m) => s * s * oscillation(&ajc_doublet(params, Atom::Excited, m), t),
        None => 0.0,
    };
    let s_z = -((1.0 + c) * (1.0 + c) * oscillation(&upper, t) - lower_term) / (4.0 * (1.0 + c));
    let depletion = s * s / (1.0 + c);
    let n = n as f64;
    Observables {
        s_z,
        atomic_excitation: 0.5 - s_z,
        photon: n + 1.5 - depletion + s_z,
        n_jc: n + 1.0 - depletion + 2.0 * s_z,
        n_ajc: n + 2.0 - depletion,
    }
}

pub fn observables(params: &ModelParams, frame: Frame, n: usize, t: f64) -> Observables {
    match frame {
        Frame::Rf => observables_rf(params, n, t),
        Frame::Crf => observables_crf(params, n, t),
    }
}

/// The two Rabi frequencies beating in a frame's observables at initial
/// photon number `n`: `(R_{e,n+1}, R_{g,n-1})` for RF and
/// `(R̄_{g,n+1}, R̄_{e,n-1})` for CRF. The second is absent at `n = 0`.
pub fn beat_frequencies(params: &ModelParams, frame: Frame, n: usize) -> (f64, Option<f64>) {
    match frame {
        Frame::Rf => (
            jc_doublet(params, Atom::Excited, n).rabi,
            n.checked_sub(1)
                .map(|m| jc_doublet(params, Atom::Ground, m).rabi),
        ),
        Frame::Crf => (
            ajc_doublet(params, Atom::Ground, n).rabi,
            n.checked_sub(1)
                .map(|m| ajc_doublet(params, Atom::Excited, m).rabi),
        ),
    }
}
