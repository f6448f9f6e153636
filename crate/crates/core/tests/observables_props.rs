mod common;

use fqsd::linalg::kron;
use fqsd::observables::{concurrence, expectation};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_local_unitary_invariant(
        rho in common::density(4),
        ua in common::unitary(2),
        ub in common::unitary(2),
    ) {
        let u = kron(&ua, &ub);
        let rotated = &u * &rho * u.adjoint();
        let d = (concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs();
        prop_assert!(d <= 1e-10, "{d:e}");
    }

    #[test]
    fn hermitian_expectations_are_real(rho in common::density(4), op in common::hermitian(4)) {
        prop_assert!(expectation(&rho, &op).unwrap().im.abs() <= 1e-12);
    }
}
