//! Structural properties of every model.

use fqsd::linalg::{anticommutator, dagger, hermiticity_error, identity, max_abs, max_abs_diff, zeros};
use fqsd::models::{build_n_boson, build_n_fermion, build_one_qubit, build_qbm, build_two_qubit, ModelSpec, TwoQubitParams};
use proptest::prelude::*;

fn check(m: &ModelSpec) -> Result<(), TestCaseError> {
    prop_assert!(hermiticity_error(&m.h_s) <= 1e-12);
    prop_assert_eq!(max_abs_diff(&m.assemble(&m.initial_coeffs), &m.l), 0.0);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_qubit(omega in -5.0..5.0f64) {
        check(&build_one_qubit(omega).unwrap())?;
    }

    #[test]
    fn two_qubit(p in prop::array::uniform6(-2.0..2.0f64)) {
        let m = build_two_qubit(TwoQubitParams {
            omega_a: p[0], omega_b: p[1], j_xy: p[2], j_z: p[3], kappa_a: p[4], kappa_b: p[5],
        }).unwrap();
        check(&m)?;
    }

    #[test]
    fn oscillator(omega in 0.0..3.0f64, n in 2usize..20) {
        check(&build_qbm(omega, n).unwrap())?;
    }

    #[test]
    fn fermions(energies in prop::collection::vec(-2.0..2.0f64, 1..=6)) {
        check(&build_n_fermion(&energies).unwrap())?;
    }

    #[test]
    fn boson_pair(w1 in -2.0..2.0f64, w2 in -2.0..2.0f64) {
        check(&build_n_boson(w1, w2).unwrap())?;
    }
}

#[test]
fn fermion_operators_obey_car() {
    for n in 1..=4 {
        let m = build_n_fermion(&vec![1.0; n]).unwrap();
        let a = &m.q_basis[..n];
        let id = identity(m.dim);
        for i in 0..n {
            for j in 0..n {
                assert!(max_abs(&anticommutator(&a[i], &a[j])) <= 1e-14);
                let expect = if i == j { id.clone() } else { zeros(m.dim) };
                assert!(max_abs_diff(&anticommutator(&a[i], &dagger(&a[j])), &expect) <= 1e-14);
            }
        }
    }
}
