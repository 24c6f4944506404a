//! The full invariant matrix: operator algebra, parity, frame conjugation,
//! eigenstates, unitarity, closed form against oracle, and conservation.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::analytic::{self, Frame, Observable, Sign};
use crate::error::Result;
use crate::exec::Execution;
use crate::experiment::tau_grid;
use crate::hilbert::{
    basis_state, real, Atom, HilbertSpace, OperatorMatrix, Propagator, StateVector,
};
use crate::model::{
    build_components, build_effective, build_number_ops, build_parity, build_rabi,
    build_transition_ops, conjugate, frame_conjugation_check, parity_of, Ladder, ModelParams,
};
use crate::oracle::{self, interior_commutator_norm, ComparisonReport};

pub const ALGEBRA_N_MAX: usize = 20;
pub const SCENARIO_NS: [usize; 4] = [0, 1, 5, 40];
pub const SCENARIO_TAU_MAX: f64 = 25.0;
pub const SCENARIO_STEPS: usize = 200;
/// Lower bound on a quantity that must not be conserved.
pub const NONCONSERVED_MIN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub algebra: f64,
    pub eigen: f64,
    pub conjugation: f64,
    pub unitarity: f64,
    pub state: f64,
    pub observable: f64,
    pub flatness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            eigen: 1e-12,
            conjugation: 1e-12,
            unitarity: 1e-12,
            state: oracle::STATE_TOL,
            observable: oracle::OBSERVABLE_TOL,
            flatness: oracle::FLATNESS_TOL,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            algebra: tol,
            eigen: tol,
            conjugation: tol,
            unitarity: tol,
            state: tol,
            observable: tol,
            flatness: tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: Option<f64>,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured: Some(measured),
            bound: Bound::AtMost,
            threshold,
            passed: measured <= threshold,
            detail: None,
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured: Some(measured),
            bound: Bound::AtLeast,
            threshold,
            passed: measured >= threshold,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, threshold: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            measured: None,
            bound: Bound::AtMost,
            threshold,
            passed: false,
            detail: Some(detail),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        writeln!(
            f,
            "{:<width$}  {:>12}  {:>13}  status",
            "check", "measured", "bound"
        )?;
        for c in &self.checks {
            let measured = c
                .measured
                .map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let mut line = format!(
                "{:<width$}  {:>12}  {:>2} {:>10.3e}  {}",
                c.name,
                measured,
                op,
                c.threshold,
                if c.passed { "PASS" } else { "FAIL" }
            );
            if let Some(d) = &c.detail {
                let _ = write!(line, "  ({d})");
            }
            writeln!(f, "{line}")?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} passed, {} failed",
            self.checks.len(),
            self.checks.len() - failed,
            failed
        )
    }
}

pub fn figure_params(frame: Frame) -> ModelParams {
    let xi = match frame {
        Frame::Rf => crate::figures::RF_XI,
        Frame::Crf => crate::figures::CRF_XI,
    };
    ModelParams::from_dimensionless(xi, crate::experiment::DEFAULT_EPSILON, 1.0)
        .expect("figure parameters are valid")
}

/// `(ω₀, ω)` pairs for the `n = 0` eigenvalue identities, `g = 1`.
pub const EIGEN_PARAM_SETS: [(f64, f64); 3] = [(1.0, 1.0), (1.5, 1.0), (1.0, 0.16)];

fn residual(h: &OperatorMatrix, psi: &StateVector, energy: f64) -> Result<f64> {
    h.apply(psi)?.max_abs_diff(&psi.scaled(real(energy)))
}

fn guard(name: &str, threshold: f64, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult::failed(name, threshold, e.to_string()))
}

fn eigen_checks(tol: &Tolerances) -> Vec<CheckResult> {
    let space = HilbertSpace::new(ALGEBRA_N_MAX);
    let mut out = Vec::new();
    for (omega0, omega) in EIGEN_PARAM_SETS {
        let label = format!("w0={omega0},w={omega}");
        let name = format!("eigen/ajc_e0[{label}]");
        out.push(guard(&name, tol.eigen, || {
            let p = ModelParams::new(omega, omega0, 1.0)?;
            let (_, h_ajc) = build_effective(&p, space);
            let e0 = basis_state(space, Atom::Excited, 0)?;
            Ok(CheckResult::at_most(
                &name,
                residual(&h_ajc, &e0, 0.5 * (omega0 + omega))?,
                tol.eigen,
            ))
        }));
        let name = format!("eigen/jc_g0[{label}]");
        out.push(guard(&name, tol.eigen, || {
            let p = ModelParams::new(omega, omega0, 1.0)?;
            let (h_jc, _) = build_effective(&p, space);
            let g0 = basis_state(space, Atom::Ground, 0)?;
            Ok(CheckResult::at_most(
                &name,
                residual(&h_jc, &g0, -0.5 * (omega0 - omega))?,
                tol.eigen,
            ))
        }));
    }
    for frame in [Frame::Rf, Frame::Crf] {
        let p = figure_params(frame);
        let name = format!("eigen/dressed_residuals[{frame}]");
        out.push(guard(&name, tol.eigen, || {
            let (h_jc, h_ajc) = build_effective(&p, space);
            let mut worst = 0.0f64;
            for n in 1..=5 {
                for sign in [Sign::Plus, Sign::Minus] {
                    let (psi, e) = analytic::ajc_eigenstate(&p, space, n, sign)?;
                    worst = worst.max(residual(&h_ajc, &psi, e)?);
                    let (psi, e) = analytic::jc_eigenstate(&p, space, n, sign)?;
                    worst = worst.max(residual(&h_jc, &psi, e)?);
                }
            }
            Ok(CheckResult::at_most(&name, worst, tol.eigen))
        }));
    }
    out
}

fn algebra_checks(tol: &Tolerances) -> Vec<CheckResult> {
    let space = HilbertSpace::new(ALGEBRA_N_MAX);
    let keep = ALGEBRA_N_MAX - 2;
    let p = figure_params(Frame::Crf);
    let l = Ladder::new(space);
    let id = &l.identity;
    let (n_jc, n_ajc) = build_number_ops(space);
    let (h, h_bar) = build_components(&p, space);
    let (h_jc, h_ajc) = build_effective(&p, space);
    let (a_jc, a_ajc) = build_transition_ops(&p, space);
    let h_r = build_rabi(&p, space);
    let t = tol.algebra;
    let interior_diff =
        |x: &OperatorMatrix, y: &OperatorMatrix| (x - y).project_interior(keep).max_abs();
    let g2 = real(p.g() * p.g());

    let mut out = vec![
        CheckResult::at_most(
            "algebra/ladder_commutator",
            interior_diff(&(&(&l.a * &l.a_dag) - &(&l.a_dag * &l.a)), id),
            t,
        ),
        CheckResult::at_most(
            "algebra/n_jc_commutes_h",
            interior_commutator_norm(&n_jc, &h, keep),
            t,
        ),
        CheckResult::at_most(
            "algebra/n_ajc_commutes_h_bar",
            interior_commutator_norm(&n_ajc, &h_bar, keep),
            t,
        ),
        CheckResult::at_most(
            "algebra/n_jc_commutes_h_jc",
            interior_commutator_norm(&n_jc, &h_jc, keep),
            t,
        ),
        CheckResult::at_most(
            "algebra/n_ajc_commutes_h_ajc",
            interior_commutator_norm(&n_ajc, &h_ajc, keep),
            t,
        ),
        CheckResult::at_least(
            "algebra/n_jc_breaks_h_ajc",
            interior_commutator_norm(&n_jc, &h_ajc, keep),
            0.1 * p.g(),
        ),
        CheckResult::at_least(
            "algebra/n_ajc_breaks_h_jc",
            interior_commutator_norm(&n_ajc, &h_jc, keep),
            0.1 * p.g(),
        ),
        CheckResult::at_least(
            "algebra/components_do_not_commute",
            interior_commutator_norm(&h, &h_bar, keep),
            0.1 * p.g(),
        ),
        CheckResult::at_most(
            "algebra/rabi_half_sum",
            h_r.max_abs_diff(&(&h + &h_bar).scaled(real(0.5)))
                .unwrap_or(f64::INFINITY),
            t,
        ),
        CheckResult::at_most(
            "algebra/transition_square_jc",
            interior_diff(
                &(&a_jc * &a_jc),
                &(&id.scaled(real(p.delta().powi(2) / 4.0)) + &n_jc.scaled(g2)),
            ),
            t,
        ),
        CheckResult::at_most(
            "algebra/transition_square_ajc",
            interior_diff(
                &(&a_ajc * &a_ajc),
                &(&id.scaled(real(p.delta_bar().powi(2) / 4.0)) + &(&n_ajc - id).scaled(g2)),
            ),
            t,
        ),
    ];

    let parity = build_parity(space, 1).expect("k = 1 is valid");
    out.push(CheckResult::at_most(
        "parity/jc_equals_ajc",
        parity
            .max_abs_diff(&parity_of(&n_ajc, 1))
            .unwrap_or(f64::INFINITY),
        t,
    ));
    let conj_dev = [&h_r, &h, &h_bar]
        .into_iter()
        .map(|op| {
            conjugate(op, &parity)
                .max_abs_diff(op)
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most(
        "parity/symmetry_of_hamiltonians",
        conj_dev,
        t,
    ));
    let parity2 = build_parity(space, 2).expect("k = 2 is valid");
    out.push(CheckResult::at_most(
        "parity/square_is_identity",
        (&parity * &parity)
            .max_abs_diff(id)
            .unwrap_or(f64::INFINITY)
            .max(parity2.max_abs_diff(id).unwrap_or(f64::INFINITY)),
        t,
    ));
    out
}

/// Sample times for the frame-conjugation check, fixed for reproducibility.
pub fn conjugation_times() -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51ab);
    (0..20).map(|_| rng.gen_range(0.0..100.0)).collect()
}

fn conjugation_check(tol: &Tolerances) -> CheckResult {
    let space = HilbertSpace::new(ALGEBRA_N_MAX);
    let worst = [Frame::Rf, Frame::Crf]
        .into_iter()
        .flat_map(|f| {
            let p = figure_params(f);
            conjugation_times()
                .into_iter()
                .map(move |t| frame_conjugation_check(&p, space, t))
        })
        .fold(0.0, f64::max);
    CheckResult::at_most("conjugation/rf_and_crf", worst, tol.conjugation)
}

/// `max |U†U − I|` for `U = exp(−iHt)`.
pub fn unitarity_deviation(h: &OperatorMatrix, t: f64) -> Result<f64> {
    let u = Propagator::new(h)?.unitary(t);
    (&u.adjoint() * &u).max_abs_diff(&OperatorMatrix::identity(h.space()))
}

fn unitarity_checks(tol: &Tolerances, n_max: usize) -> Vec<CheckResult> {
    [Frame::Rf, Frame::Crf]
        .into_iter()
        .map(|frame| {
            let name = format!("unitarity/{frame}");
            guard(&name, tol.unitarity, || {
                let h = oracle::frame_hamiltonian(
                    &figure_params(frame),
                    HilbertSpace::new(n_max),
                    frame,
                );
                let dev = [1.0, SCENARIO_TAU_MAX]
                    .into_iter()
                    .map(|t| unitarity_deviation(&h, t))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok(CheckResult::at_most(&name, dev, tol.unitarity))
            })
        })
        .collect()
}

fn scenario_checks(report: &ComparisonReport, tol: &Tolerances) -> Vec<CheckResult> {
    let s = report.scenario;
    let tag = format!("{}/n={}", s.frame, s.n);
    let (conserved, broken) = match s.frame {
        Frame::Rf => (Observable::NJc, Observable::NAjc),
        Frame::Crf => (Observable::NAjc, Observable::NJc),
    };
    vec![
        CheckResult::at_most(
            format!("oracle/{tag}/state"),
            report.max_state_dev,
            tol.state,
        ),
        CheckResult::at_most(
            format!("oracle/{tag}/observables"),
            report.worst_observable_dev(),
            tol.observable,
        ),
        CheckResult::at_most(
            format!("conservation/{tag}/{}_flat", conserved.name()),
            report.oracle_spread.get(conserved),
            tol.flatness,
        ),
        CheckResult::at_least(
            format!("conservation/{tag}/{}_varies", broken.name()),
            report.oracle_spread.get(broken),
            NONCONSERVED_MIN,
        ),
    ]
}

/// Runs every check. `n_max` overrides the oracle truncation, which otherwise
/// defaults to `n + 20` per scenario.
pub fn verify_suite(tol: &Tolerances, n_max: Option<usize>) -> VerifyReport {
    verify_suite_with(tol, n_max, Execution::default())
}

pub fn verify_suite_with(tol: &Tolerances, n_max: Option<usize>, exec: Execution) -> VerifyReport {
    let grid = tau_grid(SCENARIO_TAU_MAX, SCENARIO_STEPS);
    let scenarios: Vec<(Frame, usize)> = [Frame::Rf, Frame::Crf]
        .into_iter()
        .flat_map(|f| SCENARIO_NS.into_iter().map(move |n| (f, n)))
        .collect();

    #[derive(Clone, Copy)]
    enum Job {
        Eigen,
        Algebra,
        Conjugation,
        Unitarity,
        Scenario(Frame, usize),
    }
    let mut jobs = vec![Job::Eigen, Job::Algebra, Job::Conjugation, Job::Unitarity];
    jobs.extend(scenarios.into_iter().map(|(f, n)| Job::Scenario(f, n)));

    let groups = exec.map(&jobs, |job| match *job {
        Job::Eigen => eigen_checks(tol),
        Job::Algebra => algebra_checks(tol),
        Job::Conjugation => vec![conjugation_check(tol)],
        Job::Unitarity => unitarity_checks(tol, n_max.unwrap_or(ALGEBRA_N_MAX + 40)),
        Job::Scenario(frame, n) => {
            let truncation = n_max.unwrap_or(n + crate::experiment::DEFAULT_HEADROOM);
            match oracle::compare_scenario_with(
                &figure_params(frame),
                frame,
                n,
                &grid,
                truncation,
                Execution::Sequential,
            ) {
                Ok(report) => scenario_checks(&report, tol),
                Err(e) => vec![CheckResult::failed(
                    format!("oracle/{frame}/n={n}"),
                    tol.state,
                    e.to_string(),
                )],
            }
        }
    });
    VerifyReport {
        checks: groups.into_iter().flatten().collect(),
    }
}
