//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion.
//!
//! Reference values come from oracles written here, independent of the
//! library code paths where possible: analytic qubit amplitudes, the
//! analytic Lindblad solution, a hand-built XX chain and subset-sum
//! free-fermion spectra.
//!
//! Sub-checks marked `known_red` are reported but do not fail the test.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use fqsd::config::{coherent_state, LoadedConfig, ModelConfig, Overrides};
use fqsd::grassmann::{novikov_check, recovery_check};
use fqsd::linalg::{c, kron_all, CMatrix, CVector, C64, I};
use fqsd::master::{integrate, markov_limit_check, CoefficientSource, DensityMatrix};
use fqsd::models::{build_one_qubit, build_qbm, quadratures, TwoQubitParams};
use fqsd::oracle::{exact_evolve, CompositeSpec};
use fqsd::qops::{
    solve_bosonic_o, solve_n_fermion, solve_one_qubit, solve_qbm_zeroth, solve_two_qubit_exact,
    solve_two_qubit_zeroth, QbarSeries, SolveOptions,
};
use fqsd::run::simulate;
use fqsd::{BathMode, CorrelationKernel};
use rayon::prelude::*;

struct Sub {
    label: String,
    measured: f64,
    bound: String,
    pass: bool,
    known_red: bool,
}

fn le(label: impl Into<String>, measured: f64, tol: f64) -> Sub {
    Sub {
        label: label.into(),
        measured,
        bound: format!("<= {tol:.0e}"),
        pass: measured.is_finite() && measured <= tol,
        known_red: false,
    }
}

fn known_red(mut s: Sub) -> Sub {
    s.known_red = true;
    s
}

struct Criterion {
    id: u8,
    title: &'static str,
    subs: Vec<Sub>,
    seconds: f64,
}

impl Criterion {
    fn pass(&self) -> bool {
        self.subs.iter().all(|s| s.pass)
    }

    fn line(&self) -> String {
        let parts: Vec<String> = self
            .subs
            .iter()
            .map(|s| {
                format!(
                    "{}{} = {:.3e} {}{}",
                    if s.pass { "" } else { "!" },
                    s.label,
                    s.measured,
                    s.bound,
                    if s.known_red && !s.pass { " [known]" } else { "" }
                )
            })
            .collect();
        format!(
            "{} criterion {:>2} {} ({:.2} s): {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            parts.join("; ")
        )
    }
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Vec<Sub>) -> Criterion {
    let start = Instant::now();
    let subs = f();
    Criterion {
        id,
        title,
        subs,
        seconds: start.elapsed().as_secs_f64(),
    }
}

// ---------- test-side oracles ----------

/// Qubit `(|e> + |g>)/sqrt 2` coupled to vacuum modes, solved in the
/// one-excitation sector: returns `(rho_ee, rho_21)` at `t`.
fn qubit_amplitude_oracle(omega: f64, modes: &[(C64, f64)], t: f64) -> (f64, C64) {
    let m = modes.len();
    let mut h = CMatrix::zeros(m + 1, m + 1);
    h[(0, 0)] = C64::from(omega / 2.0);
    for (k, (g, w)) in modes.iter().enumerate() {
        h[(0, k + 1)] = *g;
        h[(k + 1, 0)] = g.conj();
        h[(k + 1, k + 1)] = C64::from(w - omega / 2.0);
    }
    let u = (h * (-I * t)).exp();
    let a = u[(0, 0)] * FRAC_1_SQRT_2;
    let cg = (I * omega * t / 2.0).exp() * FRAC_1_SQRT_2;
    (a.norm_sqr(), cg * a.conj())
}

/// Trace distance of two qubit states via `sqrt(d_ee^2 + |d_21|^2)`.
fn qubit_distance(rho: &CMatrix, ee: f64, r21: C64) -> f64 {
    ((rho[(0, 0)].re - ee).powi(2) + (rho[(1, 0)] - r21).norm_sqr()).sqrt()
}

fn pauli(k: u8) -> CMatrix {
    let z = C64::from(0.0);
    let o = C64::from(1.0);
    match k {
        b'x' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        b'y' => CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        _ => CMatrix::identity(2, 2),
    }
}

/// `(1/2) sum_i (X_i X_{i+1} + Y_i Y_{i+1})` on a ring.
fn xx_ring(n: usize) -> CMatrix {
    let dim = 1 << n;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..n {
        let j = (i + 1) % n;
        for p in *b"xy" {
            let factors: Vec<CMatrix> = (0..n)
                .map(|s| if s == i || s == j { pauli(p) } else { pauli(b'1') })
                .collect();
            h += kron_all(&factors) * C64::from(0.5);
        }
    }
    h
}

fn sorted_eigs(h: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn subset_sums(eps: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..1usize << eps.len())
        .map(|mask| {
            eps.iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, e)| e)
                .sum()
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn max_series_diff(a: &QbarSeries, b: &QbarSeries, i: usize) -> f64 {
    a.trace(i)
        .iter()
        .zip(b.trace(i))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn plus() -> CVector {
    CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
}

// ---------- criteria ----------

fn criterion_1() -> Criterion {
    timed(1, "closed-form coherence through the X1 pole", || {
        let start = Instant::now();
        let model = build_one_qubit(1.0).unwrap();
        let k = CorrelationKernel::SingleMode {
            g: C64::from(1.0),
            omega_b: 1.0,
        };
        let rho0 = DensityMatrix::from_pure(&plus()).unwrap();
        let traj = integrate(&model, &k, &rho0, 3.0, 1e-3, CoefficientSource::ClosedForm).unwrap();
        let dev = traj
            .times
            .iter()
            .zip(traj.entry(1, 0))
            .map(|(t, r)| (r - (I * *t).exp() * (0.5 * t.cos())).norm())
            .fold(0.0, f64::max);
        let secs = start.elapsed().as_secs_f64();
        vec![le("max |rho21 - 0.5 e^{it} cos t|", dev, 1e-6), le("runtime s", secs, 1.0)]
    })
}

fn master_vs_amplitudes(modes: &[(C64, f64)]) -> f64 {
    let model = build_one_qubit(1.0).unwrap();
    let kernel = CorrelationKernel::DiscreteModes(modes.iter().map(|(g, w)| BathMode::new(*g, *w)).collect());
    let rho0 = DensityMatrix::from_pure(&plus()).unwrap();
    let traj = integrate(&model, &kernel, &rho0, 3.0, 1e-3, CoefficientSource::Grid).unwrap();
    assert_eq!(traj.len(), 3001, "run stopped early");
    traj.states
        .iter()
        .map(|s| {
            let (ee, r21) = qubit_amplitude_oracle(1.0, modes, s.time);
            qubit_distance(&s.rho, ee, r21)
        })
        .fold(0.0, f64::max)
}

fn three_modes() -> Vec<(C64, f64)> {
    vec![(c(0.5, 0.0), 1.5), (c(0.3, 0.2), 2.0), (c(0.25, 0.0), 0.5)]
}

fn criterion_2() -> Criterion {
    timed(2, "master equation vs exact composite", || {
        vec![
            le("single mode g=0.8 w_b=1.5 trace dist", master_vs_amplitudes(&[(c(0.8, 0.0), 1.5)]), 1e-4),
            le("three modes trace dist", master_vs_amplitudes(&three_modes()), 1e-4),
        ]
    })
}

fn criterion_3() -> Criterion {
    timed(3, "noise-average identities", || {
        let start = Instant::now();
        let model = build_one_qubit(1.0).unwrap();
        // Resonant g = 1: u(t) = cos t, so X1 = tan t.
        let rep = novikov_check(&model, &[BathMode::real(1.0, 1.0)], &plus(), 1e-3, &[0.25, 0.5, 1.0], |t| {
            Ok(C64::from(t.tan()))
        })
        .unwrap();
        let first = rep.first.iter().copied().fold(0.0, f64::max);
        let second = rep.second.iter().copied().fold(0.0, f64::max);
        vec![
            le("first identity", first, 1e-8),
            le("second identity", second, 1e-8),
            le("runtime s", start.elapsed().as_secs_f64(), 5.0),
        ]
    })
}

fn criterion_4() -> Criterion {
    timed(4, "Grassmann mean recovers the reduced state", || {
        let model = build_one_qubit(1.0).unwrap();
        let psi0 = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let one = [BathMode::real(0.8, 1.5)];
        let two = [BathMode::real(0.6, 1.0), BathMode::new(c(0.3, 0.2), 1.7)];
        vec![
            le("M=1", recovery_check(&model, &one, &psi0, 2.0, 1e-3).unwrap(), 1e-6),
            le("M=2", recovery_check(&model, &two, &psi0, 2.0, 1e-3).unwrap(), 1e-6),
        ]
    })
}

fn criterion_5() -> Criterion {
    timed(5, "fermionic vs bosonic operator", || {
        let k = CorrelationKernel::OrnsteinUhlenbeck {
            gamma: 0.4,
            big_omega: FRAC_PI_4,
        };
        let opts = SolveOptions::default();
        let (same, split) = rayon::join(
            || solve_bosonic_o(&k, 1.0, 1.0, 10.0, 0.01, &opts).unwrap(),
            || solve_bosonic_o(&k, 2.0, 1.0, 10.0, 0.01, &opts).unwrap(),
        );
        let x5 = same.noise.as_ref().map_or(0.0, |n| n.max_abs());
        let x3 = split.series.max_abs(2);
        vec![
            le("w1=w2 sup|X3|", same.series.max_abs(2), 1e-8),
            le("w1=w2 sup|X4|", same.series.max_abs(3), 1e-8),
            le("w1=w2 sup|X5|", x5, 1e-8),
            Sub {
                label: "w1=2,w2=1 max|X3|".into(),
                measured: x3,
                bound: ">= 1e-3".into(),
                pass: x3 >= 1e-3,
                known_red: false,
            },
        ]
    })
}

fn criterion_6() -> Criterion {
    timed(6, "symmetric two-qubit coefficients", || {
        let k = CorrelationKernel::OhmicZeroT {
            strength: 0.3,
            cutoff: 1.0,
        };
        let f = solve_two_qubit_zeroth(&k, TwoQubitParams::symmetric(1.0, 0.5, 0.2), 10.0, 0.01).unwrap();
        assert_eq!(f.len(), 1001);
        let gap = |i: usize, j: usize| {
            f.coeffs
                .iter()
                .map(|c| (c[i].norm() - c[j].norm()).abs())
                .fold(0.0, f64::max)
        };
        vec![le("||F1|-|F2||", gap(0, 1), 1e-10), le("||F3|-|F4||", gap(2, 3), 1e-10)]
    })
}

fn criterion_7() -> Criterion {
    timed(7, "Markov limit", || {
        let model = build_one_qubit(1.0).unwrap();
        let rho0 = DensityMatrix::from_pure(&CVector::from_vec(vec![c(0.6, 0.0), c(0.8, 0.0)])).unwrap();
        // Independent Lindblad solution with rate 1/2: rho_ee = 0.36 e^{-t},
        // rho_21 = 0.48 e^{(i - 1/2) t}.
        let dist = |gamma: f64| {
            let k = CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega: 0.0 };
            let traj = integrate(&model, &k, &rho0, 5.0, 1e-3, CoefficientSource::Exponential).unwrap();
            assert_eq!(traj.len(), 5001);
            let ours = traj
                .states
                .iter()
                .map(|s| {
                    let t = s.time;
                    qubit_distance(&s.rho, 0.36 * (-t).exp(), c(-0.5 * t, t).exp() * 0.48)
                })
                .fold(0.0, f64::max);
            let lib = markov_limit_check(&model, &k, &rho0, 5.0, 1e-3, Some(0.5)).unwrap();
            (ours, lib)
        };
        let (d100, l100) = dist(100.0);
        let (d1000, _) = dist(1000.0);
        vec![
            le("gamma=100 trace dist", d100, 1e-2),
            Sub {
                label: "gamma=1000 trace dist".into(),
                measured: d1000,
                bound: format!("< {d100:.3e}"),
                pass: d1000 < d100,
                known_red: false,
            },
            le("library Lindblad reference vs analytic", (l100 - d100).abs(), 1e-6),
        ]
    })
}

fn criterion_8() -> Criterion {
    timed(8, "physicality of shipped configs and oracle states", || {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        let mut paths: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        assert!(paths.len() >= 6, "demo configs missing");
        let runs: Vec<_> = paths
            .iter()
            .flat_map(|p| LoadedConfig::from_path(p, Overrides::default()).unwrap().expand().unwrap())
            .filter(|(_, cfg)| !matches!(cfg.model, ModelConfig::NBoson { .. }))
            .collect();
        let stats: Vec<(f64, f64, bool)> = runs
            .into_par_iter()
            .map(|(label, cfg)| {
                let o = simulate(label, cfg).unwrap();
                let inv = o.invariants;
                (inv.max_trace_error, inv.max_hermiticity_error, inv.truncated_at.is_none())
            })
            .collect();
        let trace = stats.iter().map(|s| s.0).fold(0.0, f64::max);
        let herm = stats.iter().map(|s| s.1).fold(0.0, f64::max);
        let full = stats.iter().filter(|s| !s.2).count();

        let model = build_one_qubit(1.0).unwrap();
        let modes: Vec<BathMode> = three_modes().iter().map(|(g, w)| BathMode::new(*g, *w)).collect();
        let spec = CompositeSpec::new(model, modes).unwrap();
        let states = exact_evolve(&spec, &spec.with_vacuum(&plus()).unwrap(), 3.0, 1e-2).unwrap();
        let min_eig = states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min);
        vec![
            le("config trace error", trace, 1e-10),
            le("config Hermiticity error", herm, 1e-10),
            le("runs stopped early", full as f64, 0.0),
            Sub {
                label: "oracle min eigenvalue".into(),
                measured: min_eig,
                bound: ">= -1e-12".into(),
                pass: min_eig >= -1e-12,
                known_red: false,
            },
        ]
    })
}

fn oscillator_moments(n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let model = build_qbm(1.0, n_max).unwrap();
    let k = CorrelationKernel::OrnsteinUhlenbeck {
        gamma: 2.0,
        big_omega: FRAC_PI_2,
    };
    let psi = coherent_state(C64::from(FRAC_1_SQRT_2), n_max);
    let rho0 = DensityMatrix::from_pure(&psi).unwrap();
    let traj = integrate(&model, &k, &rho0, 10.0, 0.01, CoefficientSource::Grid).unwrap();
    assert_eq!(traj.len(), 1001);
    let (q, p) = quadratures(n_max);
    (
        traj.expectation(&q).iter().map(|z| z.re).collect(),
        traj.expectation(&p).iter().map(|z| z.re).collect(),
    )
}

fn criterion_9() -> Criterion {
    timed(9, "oscillator moments and Fock convergence", || {
        let h = 0.01;
        let omega_m = 1.0;
        let ((q30, p30), (q40, _)) = rayon::join(|| oscillator_moments(30), || oscillator_moments(40));
        // With L = q the dissipator drops out of d<q>/dt, leaving 2 omega_m <p>.
        let residual = (1..q30.len() - 1)
            .map(|k| ((q30[k + 1] - q30[k - 1]) / (2.0 * h) - 2.0 * omega_m * p30[k]).abs())
            .fold(0.0, f64::max);
        let pmax = p30.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let bound = 5.0 * h * h * pmax;
        let conv = q30.iter().zip(&q40).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        vec![
            Sub {
                label: "central-difference residual".into(),
                measured: residual,
                bound: format!("<= 5h^2 max|p| = {bound:.3e}"),
                pass: residual <= bound,
                known_red: false,
            },
            le("<q> change n_max 30 -> 40", conv, 1e-6),
        ]
    })
}

fn criterion_10() -> Criterion {
    timed(10, "XX ring vs free fermions", || {
        let mut subs = Vec::new();
        for n in [2usize, 4, 8] {
            let spin = sorted_eigs(&xx_ring(n));
            let eps: Vec<f64> = (0..n).map(|p| 2.0 * (2.0 * PI * p as f64 / n as f64).cos()).collect();
            let free = subset_sums(&eps);
            let dev = spin.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let lib = fqsd::oracle::chain_equivalence(n, fqsd::models::ChainBoundary::Periodic).unwrap();
            assert!((lib.deviation - dev).abs() < 1e-9, "library and test oracle disagree");
            let s = le(format!("N={n} deviation"), dev, 1e-10);
            // The ring's closing bond carries the fermion parity; only the
            // parity-resolved spectrum matches (checked in chain_parity).
            subs.push(if n == 2 { s } else { known_red(s) });
        }
        subs
    })
}

fn criterion_11() -> Criterion {
    timed(11, "reduction chain", || {
        let k = CorrelationKernel::OrnsteinUhlenbeck {
            gamma: 2.0,
            big_omega: FRAC_PI_2,
        };
        let one = solve_one_qubit(&k, 1.3, 5.0, 0.01).unwrap();
        let nf = solve_n_fermion(&k, &[1.3], 5.0, 0.01).unwrap();

        let p = TwoQubitParams {
            omega_a: 1.0,
            omega_b: 0.7,
            j_xy: 0.0,
            j_z: 0.0,
            kappa_a: 1.0,
            kappa_b: 0.0,
        };
        let exact = solve_two_qubit_exact(&k, p, 2.0, 0.01, &SolveOptions::default())
            .unwrap()
            .series;
        let zeroth = solve_two_qubit_zeroth(&k, p, 2.0, 0.01).unwrap();
        let two = (0..4).map(|i| max_series_diff(&exact, &zeroth, i)).fold(0.0, f64::max);

        let qbm = solve_qbm_zeroth(&k, 0.0, 5.0, 0.01).unwrap();
        let q0 = solve_one_qubit(&k, 0.0, 5.0, 0.01).unwrap();
        vec![
            le("N-fermion(1) vs one qubit", max_series_diff(&nf, &one, 0), 1e-10),
            le("two-qubit exact(kB=J=0) vs zeroth", two, 1e-10),
            // Oscillator X1 solves a linear equation, the qubit's a quadratic one.
            known_red(le("oscillator(w_m=0) vs one qubit(w=0) X1", max_series_diff(&qbm, &q0, 0), 1e-10)),
        ]
    })
}

#[test]
fn acceptance_criteria() {
    let runners: Vec<fn() -> Criterion> = vec![
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
    ];
    // Timed criteria (1, 3) run alone first so their runtime is not inflated.
    let mut results = vec![criterion_1(), criterion_3()];
    results.extend(
        runners
            .into_par_iter()
            .enumerate()
            .filter(|(i, _)| *i != 0 && *i != 2)
            .map(|(_, f)| f())
            .collect::<Vec<_>>(),
    );
    results.sort_by_key(|c| c.id);

    let mut out = std::io::stdout().lock();
    for c in &results {
        writeln!(out, "{}", c.line()).unwrap();
    }
    let passed = results.iter().filter(|c| c.pass()).count();
    writeln!(out, "acceptance: {passed}/{} criteria pass", results.len()).unwrap();
    drop(out);

    let regressions: Vec<String> = results
        .iter()
        .flat_map(|c| c.subs.iter().map(move |s| (c.id, s)))
        .filter(|(_, s)| !s.pass && !s.known_red)
        .map(|(id, s)| format!("criterion {id}: {} = {:e}", s.label, s.measured))
        .collect();
    assert!(regressions.is_empty(), "unexpected failures: {regressions:#?}");
}

#[test]
fn chain_parity() {
    // Odd parity: periodic momenta; even parity: antiperiodic ones.
    for n in [2usize, 4, 8] {
        let spin = sorted_eigs(&xx_ring(n));
        let k = |shift: f64| -> Vec<f64> {
            (0..n)
                .map(|p| 2.0 * (2.0 * PI * (p as f64 + shift) / n as f64).cos())
                .collect()
        };
        let sector = |eps: Vec<f64>, parity: u32| -> Vec<f64> {
            (0..1usize << n)
                .filter(|m| m.count_ones() % 2 == parity)
                .map(|m| eps.iter().enumerate().filter(|(j, _)| m >> j & 1 == 1).map(|(_, e)| e).sum())
                .collect()
        };
        let mut free = sector(k(0.0), 1);
        free.extend(sector(k(0.5), 0));
        free.sort_by(f64::total_cmp);
        let dev = spin.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-10, "N = {n}: parity-resolved deviation {dev:e}");
    }
}

#[test]
fn oscillator_x1_is_the_kernel_integral() {
    // At omega_m = 0 the oscillator X1 is the running kernel integral,
    // (1 - e^{-z t}) gamma / (2 z) with z = gamma + i W; the grid solver
    // reaches it at second order.
    let (gamma, w) = (2.0, FRAC_PI_2);
    let k = CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega: w };
    let z = c(gamma, w);
    let err = |h: f64| {
        let s = solve_qbm_zeroth(&k, 0.0, 5.0, h).unwrap();
        assert_eq!(s.max_abs(1), 0.0);
        s.times
            .iter()
            .zip(s.trace(0))
            .map(|(t, x)| (x - (C64::from(1.0) - (-z * *t).exp()) * gamma / (z * 2.0)).norm())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(0.01), err(0.005));
    assert!(coarse < 1e-4, "{coarse:e}");
    assert!(coarse / fine > 3.5, "order ratio {}", coarse / fine);
}
