mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};

use qrm_core::analytic::{self, beat_frequencies, Frame, Observable, Observables};
use qrm_core::experiment::{run_experiment, tau_grid, ExperimentConfig};
use qrm_core::figures::{reproduce_figures, FIGURES};
use qrm_core::hilbert::{
    basis_state, commutator, Atom, HilbertSpace, OperatorMatrix, StateVector, C64,
};
use qrm_core::model::{
    build_components, build_effective, build_number_ops, build_parity, build_rabi,
    build_transition_ops, frame_conjugation_check, parity_of, Ladder, ModelParams,
};
use qrm_core::oracle::{compare_scenario, interior_commutator_norm, oracle_observables, spread};
use qrm_core::output::parse_csv;
use qrm_core::verify::figure_params;

const TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn residual(h: &OperatorMatrix, psi: &StateVector, energy: f64) -> f64 {
    h.apply(psi)
        .unwrap()
        .max_abs_diff(&psi.scaled(energy.into()))
        .unwrap()
}

fn eigenstate_identities() -> Outcome {
    let space = HilbertSpace::new(20);
    let mut worst = 0.0f64;
    for (omega0, omega) in [(1.0, 1.0), (1.5, 1.0), (1.0, 0.16)] {
        let p = ModelParams::new(omega, omega0, 1.0).unwrap();
        let (h_jc, h_ajc) = build_effective(&p, space);
        let e0 = basis_state(space, Atom::Excited, 0).unwrap();
        let g0 = basis_state(space, Atom::Ground, 0).unwrap();
        worst = worst.max(residual(&h_ajc, &e0, 0.5 * (omega0 + omega)));
        worst = worst.max(residual(&h_jc, &g0, -0.5 * (omega0 - omega)));
    }
    outcome(worst <= TOL, format!("max residual {worst:.2e}"))
}

fn expected_matrix(
    space: HilbertSpace,
    f: impl Fn(Atom, usize, Atom, usize) -> f64,
) -> DMatrix<C64> {
    DMatrix::from_fn(space.dim(), space.dim(), |i, j| {
        let (ai, ni) = space.label(i);
        let (aj, nj) = space.label(j);
        C64::new(f(ai, ni, aj, nj), 0.0)
    })
}

fn operator_algebra() -> Outcome {
    let n_max = 20;
    let keep = n_max - 2;
    let space = HilbertSpace::new(n_max);
    let l = Ladder::new(space);
    let mut notes = Vec::new();
    let mut ok = true;

    let a_expected = expected_matrix(space, |ai, ni, aj, nj| {
        if ai == aj && nj == ni + 1 {
            (nj as f64).sqrt()
        } else {
            0.0
        }
    });
    let sz_expected = expected_matrix(space, |ai, ni, aj, nj| match (ai, aj) {
        (Atom::Excited, Atom::Excited) if ni == nj => 0.5,
        (Atom::Ground, Atom::Ground) if ni == nj => -0.5,
        _ => 0.0,
    });
    let sp_expected = expected_matrix(space, |ai, ni, aj, nj| {
        if ai == Atom::Excited && aj == Atom::Ground && ni == nj {
            1.0
        } else {
            0.0
        }
    });
    let ladder_dev = max_abs(&(l.a.entries() - &a_expected))
        .max(max_abs(&(l.a_dag.entries() - a_expected.adjoint())))
        .max(max_abs(&(l.s_z.entries() - &sz_expected)))
        .max(max_abs(&(l.s_plus.entries() - &sp_expected)))
        .max(max_abs(&(l.s_minus.entries() - sp_expected.adjoint())));
    ok &= ladder_dev <= TOL;
    notes.push(format!("ladder {ladder_dev:.1e}"));

    for (label, p) in [
        ("rf", figure_params(Frame::Rf)),
        ("crf", figure_params(Frame::Crf)),
    ] {
        let (n_jc, n_ajc) = build_number_ops(space);
        let (h, h_bar) = build_components(&p, space);
        let (h_jc, h_ajc) = build_effective(&p, space);
        let (a_jc, a_ajc) = build_transition_ops(&p, space);
        let zero = [
            (&n_jc, &h),
            (&n_ajc, &h_bar),
            (&n_jc, &h_jc),
            (&n_ajc, &h_ajc),
            (&n_jc, &a_jc),
            (&n_ajc, &a_ajc),
        ]
        .into_iter()
        .map(|(x, y)| interior_commutator_norm(x, y, keep))
        .fold(0.0, f64::max);
        let nonzero = [
            (&n_jc, &h_bar),
            (&n_ajc, &h),
            (&h, &h_bar),
            (&n_jc, &h_ajc),
            (&n_ajc, &h_jc),
        ]
        .into_iter()
        .map(|(x, y)| interior_commutator_norm(x, y, keep))
        .fold(f64::INFINITY, f64::min);
        ok &= zero <= TOL && nonzero > 0.1 * p.g();
        notes.push(format!(
            "{label}: zero-pattern {zero:.1e}, nonzero-pattern min {nonzero:.2}"
        ));

        let id = OperatorMatrix::identity(space);
        let g2 = C64::new(p.g() * p.g(), 0.0);
        let sq_jc =
            &(&a_jc * &a_jc) - &(&id.scaled((p.delta().powi(2) / 4.0).into()) + &n_jc.scaled(g2));
        let sq_ajc = &(&a_ajc * &a_ajc)
            - &(&id.scaled((p.delta_bar().powi(2) / 4.0).into()) + &(&n_ajc - &id).scaled(g2));
        let sq = sq_jc
            .project_interior(keep)
            .max_abs()
            .max(sq_ajc.project_interior(keep).max_abs());
        ok &= sq <= TOL;

        let parity = build_parity(space, 1).unwrap();
        let h_r = build_rabi(&p, space);
        let mut par = parity.max_abs_diff(&parity_of(&n_ajc, 1)).unwrap();
        par = par.max((&parity * &parity).max_abs_diff(&id).unwrap());
        for op in [&h_r, &h, &h_bar] {
            let c = commutator(&parity, op).unwrap().max_abs();
            par = par.max(c);
        }
        ok &= par <= TOL;
        notes.push(format!("{label}: squares {sq:.1e}, parity {par:.1e}"));
    }
    outcome(ok, notes.join("; "))
}

fn frame_conjugation() -> Outcome {
    let space = HilbertSpace::new(20);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for frame in [Frame::Rf, Frame::Crf] {
        let p = figure_params(frame);
        for _ in 0..20 {
            let t = rng.gen_range(0.0..100.0);
            worst = worst.max(frame_conjugation_check(&p, space, t));
        }
    }
    outcome(
        worst <= TOL,
        format!("max deviation {worst:.2e} over 40 samples"),
    )
}

fn closed_form_vs_oracle() -> Outcome {
    let grid = tau_grid(25.0, 200);
    let mut ok = true;
    let mut worst_state = 0.0f64;
    let mut worst_obs = 0.0f64;
    for frame in [Frame::Rf, Frame::Crf] {
        for n in [0, 1, 5, 40] {
            match compare_scenario(&figure_params(frame), frame, n, &grid, n + 20) {
                Ok(r) => {
                    ok &= r.passed();
                    worst_state = worst_state.max(r.max_state_dev);
                    worst_obs = worst_obs.max(r.worst_observable_dev());
                }
                Err(e) => return outcome(false, format!("{frame} n={n}: {e}")),
            }
        }
    }
    outcome(
        ok,
        format!("8 scenarios, max state dev {worst_state:.2e}, max observable dev {worst_obs:.2e}"),
    )
}

fn conservation_dichotomy() -> Outcome {
    let grid = tau_grid(25.0, 200);
    let mut ok = true;
    let mut notes = Vec::new();
    for (frame, conserved, broken) in [
        (Frame::Rf, Observable::NJc, Observable::NAjc),
        (Frame::Crf, Observable::NAjc, Observable::NJc),
    ] {
        for n in [0, 1, 5, 40] {
            let p = figure_params(frame);
            let oracle =
                oracle_observables(&p, frame, n, &grid, n + 20, Default::default()).unwrap();
            let closed = run_experiment(&ExperimentConfig {
                frame,
                n,
                xi: p.xi(),
                epsilon: p.epsilon(),
                tau_max: 25.0,
                steps: 200,
                ..Default::default()
            })
            .unwrap();
            let flat = spread(oracle.iter().map(|o| o.get(conserved)))
                .max(spread(closed.column(conserved)));
            let varies =
                spread(oracle.iter().map(|o| o.get(broken))).min(spread(closed.column(broken)));
            ok &= flat <= TOL && varies > 0.01;
            notes.push(format!("{frame} n={n}: {flat:.1e}/{varies:.2}"));
        }
    }
    outcome(
        ok,
        format!("conserved spread / alternate spread: {}", notes.join(", ")),
    )
}

/// `exp(-iMt)ψ` for the real symmetric 2×2 block `M = [[-d, g], [g, d]]`
/// acting on `(first, second)`, with `M² = (d² + g²) I`.
fn two_level(d: f64, g: f64, first: C64, second: C64, t: f64) -> (C64, C64) {
    let r = (d * d + g * g).sqrt();
    let (c, s) = ((r * t).cos(), (r * t).sin());
    let i = C64::new(0.0, 1.0);
    (
        first * c - i * s * (-d * first + g * second) / r,
        second * c - i * s * (g * first + d * second) / r,
    )
}

fn n0_reductions() -> Outcome {
    let space = HilbertSpace::new(6);
    let mut worst = 0.0f64;
    let param_sets = [
        figure_params(Frame::Rf),
        figure_params(Frame::Crf),
        ModelParams::from_dimensionless(0.7, 0.3, 1.3).unwrap(),
        ModelParams::from_dimensionless(-0.05, 0.16, 1.0).unwrap(),
    ];
    for p in param_sets {
        let (w, g) = (p.omega(), p.g());
        for k in 0..60 {
            let t = k as f64 * 0.37;
            let phase = C64::from_polar(1.0, -w * t);

            // RF doublet (|g1⟩, |e0⟩), CRF doublet (|g0⟩, |e1⟩)
            let (g1, e0) = two_level(
                p.delta() / 2.0,
                g,
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                t,
            );
            let psi = analytic::evolve_rf(&p, space, 0, t).unwrap();
            worst = worst
                .max((psi.amplitude(Atom::Excited, 0) - phase * e0).norm())
                .max((psi.amplitude(Atom::Ground, 1) - phase * g1).norm());
            let pe = e0.norm_sqr();
            let pg = g1.norm_sqr();
            let expected = Observables {
                s_z: 0.5 * (pe - pg),
                atomic_excitation: pe,
                photon: pg,
                n_jc: 1.0,
                n_ajc: pe + 3.0 * pg,
            };
            worst = worst.max(analytic::observables_rf(&p, 0, t).max_abs_diff(&expected));

            let (g0, e1) = two_level(
                p.delta_bar() / 2.0,
                g,
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                t,
            );
            let psi = analytic::evolve_crf(&p, space, 0, t).unwrap();
            worst = worst
                .max((psi.amplitude(Atom::Ground, 0) - phase * g0).norm())
                .max((psi.amplitude(Atom::Excited, 1) - phase * e1).norm());
            let (pg, pe) = (g0.norm_sqr(), e1.norm_sqr());
            let expected = Observables {
                s_z: 0.5 * (pe - pg),
                atomic_excitation: pg,
                photon: pg + 2.0 * pe,
                n_jc: 2.0 * pe,
                n_ajc: 2.0,
            };
            worst = worst.max(analytic::observables_crf(&p, 0, t).max_abs_diff(&expected));
        }
    }
    outcome(worst <= TOL, format!("max deviation {worst:.2e}"))
}

/// Spacing of successive maxima of the slow envelope of an oscillating series.
fn envelope_period(tau: &[f64], x: &[f64]) -> Option<(f64, usize)> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let y: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let fast: Vec<(f64, f64)> = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| (tau[i], y[i]))
        .collect();
    let window = 8;
    let mut peaks = Vec::new();
    for k in window..fast.len().saturating_sub(window) {
        let v = fast[k].1;
        if (k - window..=k + window).all(|j| j == k || fast[j].1 < v) {
            let ((t0, a), (t1, b), (t2, c)) = (fast[k - 1], fast[k], fast[k + 1]);
            let denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
            let aa = (t2 * (b - a) + t1 * (a - c) + t0 * (c - b)) / denom;
            let bb = (t2 * t2 * (a - b) + t1 * t1 * (c - a) + t0 * t0 * (b - c)) / denom;
            peaks.push(if aa < 0.0 { -bb / (2.0 * aa) } else { t1 });
        }
    }
    if peaks.len() < 3 {
        return None;
    }
    Some((
        (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64,
        peaks.len(),
    ))
}

fn beat_envelope() -> Outcome {
    let n = 40;
    let grid = tau_grid(120.0, 12001);
    let mut ok = true;
    let mut notes = Vec::new();
    for (frame, derived) in [(Frame::Rf, 19.8676), (Frame::Crf, 20.0783)] {
        let p = figure_params(frame);
        let (fast, slow) = beat_frequencies(&p, frame, n);
        let expected = PI / (fast - slow.unwrap()) / p.g();
        ok &= ((expected - derived) / derived).abs() < 1e-4;
        let validated = compare_scenario(&p, frame, n, &tau_grid(120.0, 1201), n + 20)
            .map(|r| r.passed())
            .unwrap_or(false);
        let series = oracle_observables(&p, frame, n, &grid, n + 20, Default::default()).unwrap();
        let x: Vec<f64> = series.iter().map(|o| o.atomic_excitation).collect();
        match envelope_period(&grid, &x) {
            Some((measured, peaks)) => {
                let rel = ((measured - expected) / expected).abs();
                ok &= validated && rel < 0.05;
                notes.push(format!(
                    "{frame}: measured {measured:.3} vs {expected:.3} ({:.2}% over {peaks} peaks)",
                    100.0 * rel
                ));
            }
            None => {
                ok = false;
                notes.push(format!("{frame}: too few envelope peaks"));
            }
        }
    }
    outcome(ok, notes.join("; "))
}

fn figure_reproduction() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let outputs = match reproduce_figures(dir.path()) {
        Ok(o) => o,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut ok = outputs.len() == 14;
    let mut worst = 0.0f64;
    let mut cache: Vec<((Frame, usize), Vec<Observables>)> = Vec::new();
    for spec in FIGURES {
        let csv = dir.path().join(format!("{}.csv", spec.id));
        let svg = dir.path().join(format!("{}.svg", spec.id));
        ok &= svg.exists();
        let (tau, rows) = parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
        let col = Observable::ALL
            .iter()
            .position(|&o| o == spec.column)
            .unwrap();
        let series: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        match spec.id {
            "fig03" => ok &= series.iter().all(|&v| v == 1.0),
            "fig10" => ok &= series.iter().all(|&v| v == 2.0),
            _ => {}
        }
        let key = (spec.frame, spec.n);
        if !cache.iter().any(|(k, _)| *k == key) {
            let p = spec.config().params().unwrap();
            let obs = oracle_observables(
                &p,
                spec.frame,
                spec.n,
                &tau,
                spec.n + 20,
                Default::default(),
            )
            .unwrap();
            cache.push((key, obs));
        }
        let oracle = &cache.iter().find(|(k, _)| *k == key).unwrap().1;
        for (v, o) in series.iter().zip(oracle) {
            worst = worst.max((v - o.get(spec.column)).abs());
        }
    }
    ok &= worst <= 1e-9;
    outcome(
        ok,
        format!(
            "{} figures, fig03 = 1, fig10 = 2, max oracle deviation {worst:.2e}",
            outputs.len()
        ),
    )
}

fn property_suite() -> Outcome {
    let config = Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    match runner.run(&common::draws(), |d| common::all_properties(&d)) {
        Ok(()) => outcome(
            true,
            "100 draws: normalization, unitarity, orthonormality, c^2+s^2=1, number eigenvalues",
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "eigenstate identities",
        budget: Duration::from_secs(1),
        run: eigenstate_identities,
    },
    Criterion {
        id: 2,
        title: "operator algebra",
        budget: Duration::from_secs(5),
        run: operator_algebra,
    },
    Criterion {
        id: 3,
        title: "frame conjugation",
        budget: Duration::from_secs(5),
        run: frame_conjugation,
    },
    Criterion {
        id: 4,
        title: "closed form vs oracle",
        budget: Duration::from_secs(30),
        run: closed_form_vs_oracle,
    },
    Criterion {
        id: 5,
        title: "conservation dichotomy",
        budget: Duration::from_secs(30),
        run: conservation_dichotomy,
    },
    Criterion {
        id: 6,
        title: "n=0 reductions",
        budget: Duration::from_secs(5),
        run: n0_reductions,
    },
    Criterion {
        id: 7,
        title: "beat envelope at n=40",
        budget: Duration::from_secs(60),
        run: beat_envelope,
    },
    Criterion {
        id: 8,
        title: "figure reproduction",
        budget: Duration::from_secs(60),
        run: figure_reproduction,
    },
    Criterion {
        id: 9,
        title: "property suite",
        budget: Duration::from_secs(30),
        run: property_suite,
    },
];

fn main() {
    let mut failures = 0;
    for c in CRITERIA {
        let started = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| outcome(false, "panicked"));
        let elapsed = started.elapsed();
        let in_budget = elapsed <= c.budget;
        let passed = result.passed && in_budget;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {} [{}]: {} ({:.2}s of {}s) {}",
            c.id,
            c.title,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            result.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failures,
        CRITERIA.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
