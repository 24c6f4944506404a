//! Brute-force reference dynamics: dense spectral propagation under the
//! effective frame Hamiltonians, with observables taken as raw expectation
//! values, compared against the closed forms in [`crate::analytic`].

use std::fmt;

use serde::Serialize;

use crate::analytic::{self, Frame, Observable, Observables};
use crate::error::{QrmError, Result};
use crate::exec::Execution;
use crate::hilbert::{expectation, real, HilbertSpace, OperatorMatrix, Propagator, StateVector};
use crate::model::{build_effective, build_number_ops, ModelParams};

pub const STATE_TOL: f64 = 1e-9;
pub const OBSERVABLE_TOL: f64 = 1e-9;
pub const FLATNESS_TOL: f64 = 1e-12;

/// Photon levels kept free above the closed-form support.
pub const GUARD_BAND: usize = 1;

/// `exp(-iHt)ψ₀` for every `t` in `grid`, from a single eigendecomposition.
pub fn propagate_series(
    h: &OperatorMatrix,
    psi0: &StateVector,
    grid: &[f64],
    exec: Execution,
) -> Result<Vec<StateVector>> {
    Propagator::new(h)?.evolve_series(psi0, grid, exec)
}

/// The diagonal operators whose expectations make up the tracked observables.
#[derive(Clone, Debug)]
pub struct ObservableOps {
    pub s_z: OperatorMatrix,
    pub excited: OperatorMatrix,
    pub ground: OperatorMatrix,
    pub photons: OperatorMatrix,
    pub antinormal_photons: OperatorMatrix,
    pub n_jc: OperatorMatrix,
    pub n_ajc: OperatorMatrix,
}

impl ObservableOps {
    pub fn new(space: HilbertSpace) -> Self {
        use crate::hilbert::Atom;
        let diag = |f: fn(Atom, usize) -> f64| {
            OperatorMatrix::from_diagonal(space, move |a, n| real(f(a, n)))
        };
        let (n_jc, n_ajc) = build_number_ops(space);
        ObservableOps {
            s_z: diag(|a, _| if a == Atom::Excited { 0.5 } else { -0.5 }),
            excited: diag(|a, _| if a == Atom::Excited { 1.0 } else { 0.0 }),
            ground: diag(|a, _| if a == Atom::Ground { 1.0 } else { 0.0 }),
            photons: diag(|_, n| n as f64),
            antinormal_photons: diag(|_, n| n as f64 + 1.0),
            n_jc,
            n_ajc,
        }
    }
}

/// Raw expectations `⟨s_z⟩, ⟨s₊s₋⟩, ⟨s₋s₊⟩, ⟨a†a⟩, ⟨aa†⟩, ⟨N̂⟩, ⟨N̄⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RawExpectations {
    pub s_z: f64,
    pub excited: f64,
    pub ground: f64,
    pub photons: f64,
    pub antinormal_photons: f64,
    pub n_jc: f64,
    pub n_ajc: f64,
}

impl RawExpectations {
    pub fn measure(psi: &StateVector, ops: &ObservableOps) -> Result<Self> {
        Ok(RawExpectations {
            s_z: expectation(psi, &ops.s_z)?,
            excited: expectation(psi, &ops.excited)?,
            ground: expectation(psi, &ops.ground)?,
            photons: expectation(psi, &ops.photons)?,
            antinormal_photons: expectation(psi, &ops.antinormal_photons)?,
            n_jc: expectation(psi, &ops.n_jc)?,
            n_ajc: expectation(psi, &ops.n_ajc)?,
        })
    }

    /// The frame's observable set: normal order in RF, anti-normal in CRF.
    pub fn for_frame(&self, frame: Frame) -> Observables {
        let (atomic_excitation, photon) = match frame {
            Frame::Rf => (self.excited, self.photons),
            Frame::Crf => (self.ground, self.antinormal_photons),
        };
        Observables {
            s_z: self.s_z,
            atomic_excitation,
            photon,
            n_jc: self.n_jc,
            n_ajc: self.n_ajc,
        }
    }
}

pub fn observable_series(
    states: &[StateVector],
    ops: &ObservableOps,
    exec: Execution,
) -> Result<Vec<RawExpectations>> {
    exec.try_map(states, |psi| RawExpectations::measure(psi, ops))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub frame: Frame,
    pub n: usize,
    pub params: ModelParams,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} xi={:.6} eps={:.4}",
            self.frame,
            self.n,
            self.params.xi(),
            self.params.epsilon()
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub scenario: Scenario,
    pub max_state_dev: f64,
    /// Per-observable maximum absolute deviation over the grid.
    pub max_obs_dev: Observables,
    /// Dimensionless times `τ = g t`.
    pub grid: Vec<f64>,
    pub n_max: usize,
    /// Peak-to-peak spread of each oracle observable over the grid.
    pub oracle_spread: Observables,
}

impl ComparisonReport {
    pub fn worst_observable_dev(&self) -> f64 {
        Observable::ALL
            .into_iter()
            .map(|o| self.max_obs_dev.get(o))
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, state_tol: f64, obs_tol: f64) -> bool {
        self.max_state_dev <= state_tol && self.worst_observable_dev() <= obs_tol
    }

    pub fn passed(&self) -> bool {
        self.passes(STATE_TOL, OBSERVABLE_TOL)
    }
}

/// Smallest truncation that holds a scenario's closed-form support plus the
/// guard band.
pub fn required_n_max(n: usize) -> usize {
    n + 1 + GUARD_BAND
}

fn check_truncation(n: usize, n_max: usize) -> Result<()> {
    let needed = required_n_max(n);
    if needed > n_max {
        return Err(QrmError::Truncation { needed, n_max });
    }
    Ok(())
}

/// Generator of a frame's dynamics: `H_JC` (RF) or `H̄_AJC` (CRF).
pub fn frame_hamiltonian(
    params: &ModelParams,
    space: HilbertSpace,
    frame: Frame,
) -> OperatorMatrix {
    let (h_jc, h_ajc) = build_effective(params, space);
    match frame {
        Frame::Rf => h_jc,
        Frame::Crf => h_ajc,
    }
}

/// Propagated states of a scenario on a `τ` grid.
pub fn oracle_states(
    params: &ModelParams,
    frame: Frame,
    n: usize,
    tau_grid: &[f64],
    n_max: usize,
    exec: Execution,
) -> Result<Vec<StateVector>> {
    check_truncation(n, n_max)?;
    let space = HilbertSpace::new(n_max);
    let psi0 = analytic::initial_state(params, space, frame, n)?;
    let h = frame_hamiltonian(params, space, frame);
    let times: Vec<f64> = tau_grid.iter().map(|tau| tau / params.g()).collect();
    propagate_series(&h, &psi0, &times, exec)
}

/// Observables of a scenario recomputed by the oracle on a `τ` grid.
pub fn oracle_observables(
    params: &ModelParams,
    frame: Frame,
    n: usize,
    tau_grid: &[f64],
    n_max: usize,
    exec: Execution,
) -> Result<Vec<Observables>> {
    let states = oracle_states(params, frame, n, tau_grid, n_max, exec)?;
    let ops = ObservableOps::new(HilbertSpace::new(n_max));
    let raw = observable_series(&states, &ops, exec)?;
    Ok(raw.iter().map(|r| r.for_frame(frame)).collect())
}

pub fn compare_scenario(
    params: &ModelParams,
    frame: Frame,
    n: usize,
    tau_grid: &[f64],
    n_max: usize,
) -> Result<ComparisonReport> {
    compare_scenario_with(params, frame, n, tau_grid, n_max, Execution::default())
}

pub fn compare_scenario_with(
    params: &ModelParams,
    frame: Frame,
    n: usize,
    tau_grid: &[f64],
    n_max: usize,
    exec: Execution,
) -> Result<ComparisonReport> {
    let states = oracle_states(params, frame, n, tau_grid, n_max, exec)?;
    let space = HilbertSpace::new(n_max);
    let ops = ObservableOps::new(space);
    let rows: Vec<(&f64, &StateVector)> = tau_grid.iter().zip(&states).collect();
    let deviations = exec.try_map(
        &rows,
        |&(tau, psi)| -> Result<(f64, [f64; 5], Observables)> {
            let t = tau / params.g();
            let closed = analytic::evolve(params, space, frame, n, t)?;
            let state_dev = closed.max_abs_diff(psi)?;
            let numeric = RawExpectations::measure(psi, &ops)?.for_frame(frame);
            let exact = analytic::observables(params, frame, n, t);
            let obs = Observable::ALL.map(|o| (numeric.get(o) - exact.get(o)).abs());
            Ok((state_dev, obs, numeric))
        },
    )?;

    let mut max_state_dev = 0.0f64;
    let mut worst = [0.0f64; 5];
    for (state_dev, obs, _) in &deviations {
        max_state_dev = max_state_dev.max(*state_dev);
        for (w, d) in worst.iter_mut().zip(obs) {
            *w = w.max(*d);
        }
    }
    let spread_of = |o: Observable| spread(deviations.iter().map(|(_, _, x)| x.get(o)));
    Ok(ComparisonReport {
        scenario: Scenario {
            frame,
            n,
            params: *params,
        },
        max_state_dev,
        max_obs_dev: Observables {
            s_z: worst[0],
            atomic_excitation: worst[1],
            photon: worst[2],
            n_jc: worst[3],
            n_ajc: worst[4],
        },
        grid: tau_grid.to_vec(),
        n_max,
        oracle_spread: Observables {
            s_z: spread_of(Observable::SZ),
            atomic_excitation: spread_of(Observable::AtomicExcitation),
            photon: spread_of(Observable::Photon),
            n_jc: spread_of(Observable::NJc),
            n_ajc: spread_of(Observable::NAjc),
        },
    })
}

/// Max-abs entry of `P[A, B]P`, `P` projecting onto photon numbers `≤ keep`.
pub fn interior_commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix, keep: usize) -> f64 {
    (&(a * b) - &(b * a)).project_interior(keep).max_abs()
}

/// Peak-to-peak spread of a series.
pub fn spread(series: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = series
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}
