//! Master-equation and oracle invariants.

mod common;

use fqsd::config::coherent_state;
use fqsd::linalg::{hermiticity_error, trace, CMatrix, CVector, C64, I};
use fqsd::master::{integrate, rhs, CoefficientSource, DensityMatrix};
use fqsd::models::{build_n_fermion, build_one_qubit, build_qbm, build_two_qubit, quadratures, TwoQubitParams};
use fqsd::oracle::{commutative_model_defect, exact_evolve_full, CompositeSpec};
use fqsd::{BathMode, CorrelationKernel};
use proptest::prelude::*;

fn weak_kernel() -> impl Strategy<Value = CorrelationKernel> {
    prop_oneof![
        (0.5..4.0f64, -1.0..1.0f64).prop_map(|(gamma, big_omega)| CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega }),
        (0.1..0.6f64, 0.0..2.0f64).prop_map(|(g, omega_b)| CorrelationKernel::SingleMode { g: C64::from(g), omega_b }),
        (0.05..0.3f64, 0.5..2.0f64).prop_map(|(strength, cutoff)| CorrelationKernel::OhmicZeroT { strength, cutoff }),
    ]
}

fn normalised(v: Vec<C64>) -> CVector {
    let v = CVector::from_vec(v);
    let n = v.norm();
    v / C64::from(n.max(1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_is_traceless_and_hermitian(
        rho in common::density(4),
        x in prop::collection::vec(common::complex(), 4),
        p in prop::array::uniform6(-1.0..1.0f64),
    ) {
        let m = build_two_qubit(TwoQubitParams {
            omega_a: p[0], omega_b: p[1], j_xy: p[2], j_z: p[3], kappa_a: p[4], kappa_b: p[5],
        }).unwrap();
        let d = rhs(&m, &m.assemble(&x), &rho).unwrap();
        prop_assert!(trace(&d).norm() <= 1e-13);
        prop_assert!(hermiticity_error(&d) <= 1e-13);

        let f = build_n_fermion(&[p[0], p[1]]).unwrap();
        let d = rhs(&f, &f.assemble(&x[..2]), &rho).unwrap();
        prop_assert!(trace(&d).norm() <= 1e-13 && hermiticity_error(&d) <= 1e-13);
    }

    #[test]
    fn one_qubit_runs_stay_physical(
        rho in common::density(2),
        k in weak_kernel(),
        omega in 0.0..2.0f64,
    ) {
        let m = build_one_qubit(omega).unwrap();
        let traj = integrate(&m, &k, &DensityMatrix::new(rho, 0.0).unwrap(), 2.0, 0.01, CoefficientSource::Grid).unwrap();
        prop_assume!(traj.truncated_at.is_none());
        prop_assert!(traj.max_trace_error() <= 1e-10);
        prop_assert!(traj.max_hermiticity_error() <= 1e-10);
    }

    #[test]
    fn two_qubit_runs_stay_physical(rho in common::density(4), k in weak_kernel(), j in -0.5..0.5f64) {
        let m = build_two_qubit(TwoQubitParams::symmetric(1.0, j, 0.1)).unwrap();
        let traj = integrate(&m, &k, &DensityMatrix::new(rho, 0.0).unwrap(), 2.0, 0.01, CoefficientSource::Grid).unwrap();
        prop_assume!(traj.truncated_at.is_none());
        prop_assert!(traj.max_trace_error() <= 1e-10);
        prop_assert!(traj.max_hermiticity_error() <= 1e-10);
    }

    #[test]
    fn resonant_coherence_law(
        g in 0.3..2.0f64,
        omega in 0.0..2.0f64,
        amp in prop::collection::vec(common::complex(), 2),
    ) {
        let m = build_one_qubit(omega).unwrap();
        let k = CorrelationKernel::SingleMode { g: C64::from(g), omega_b: omega };
        let psi = normalised(amp);
        let rho0 = DensityMatrix::from_pure(&psi).unwrap();
        let r0 = rho0.rho[(1, 0)];
        let traj = integrate(&m, &k, &rho0, 3.0, 0.01, CoefficientSource::ClosedForm).unwrap();
        for s in &traj.states {
            let t = s.time;
            let expect = r0 * (I * omega * t).exp() * (g * t).cos();
            prop_assert!((s.rho[(1, 0)] - expect).norm() <= 1e-9);
            prop_assert!((s.rho[(0, 1)].norm() - s.rho[(1, 0)].norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn oracle_is_unitary_and_physical(
        modes in prop::collection::vec((common::complex(), -2.0..2.0f64), 1..=3),
        amp in prop::collection::vec(common::complex(), 2),
        omega in 0.0..2.0f64,
    ) {
        let bath: Vec<BathMode> = modes.iter().map(|(g, w)| BathMode::new(*g, *w)).collect();
        let spec = CompositeSpec::new(build_one_qubit(omega).unwrap(), bath).unwrap();
        prop_assert_eq!(commutative_model_defect(&spec), 0.0);
        let psi = spec.with_vacuum(&normalised(amp)).unwrap();
        for (rho, full) in exact_evolve_full(&spec, &psi, 2.0, 0.1).unwrap() {
            prop_assert!((full.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(rho.trace_error() <= 1e-12);
            prop_assert!(rho.hermiticity_error() <= 1e-12);
            prop_assert!(rho.min_eigenvalue() >= -1e-12);
        }
    }
}

/// `d<p>/dt = -2 w <q> + i (X1 - X1*) <q> + i (X2 - X2*) <p>` from the run's own coefficients.
fn momentum_residual(h: f64) -> (f64, f64) {
    let n = 20;
    let omega_m = 1.0;
    let m = build_qbm(omega_m, n).unwrap();
    let k = CorrelationKernel::OrnsteinUhlenbeck {
        gamma: 2.0,
        big_omega: std::f64::consts::FRAC_PI_2,
    };
    let rho0 = DensityMatrix::from_pure(&coherent_state(C64::from(0.5), n)).unwrap();
    let traj = integrate(&m, &k, &rho0, 4.0, h, CoefficientSource::Grid).unwrap();
    let (q, p): (CMatrix, CMatrix) = quadratures(n);
    let mq: Vec<f64> = traj.expectation(&q).iter().map(|z| z.re).collect();
    let mp: Vec<f64> = traj.expectation(&p).iter().map(|z| z.re).collect();
    let x = traj.qbar.as_ref().unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..mq.len() - 1 {
        let (x1, x2) = (x.coeffs[k][0], x.coeffs[k][1]);
        let model = -2.0 * omega_m * mq[k] + (I * (x1 - x1.conj())).re * mq[k] + (I * (x2 - x2.conj())).re * mp[k];
        worst = worst.max(((mp[k + 1] - mp[k - 1]) / (2.0 * h) - model).abs());
    }
    let scale = mq.iter().chain(&mp).map(|v| v.abs()).fold(0.0, f64::max);
    (worst, scale)
}

#[test]
fn oscillator_momentum_equation_holds_to_second_order() {
    let (coarse, scale) = momentum_residual(0.02);
    let (fine, _) = momentum_residual(0.01);
    assert!(coarse <= 5.0 * 0.02 * 0.02 * scale, "{coarse:e} vs scale {scale}");
    assert!(coarse / fine > 3.0, "ratio {}", coarse / fine);
}
