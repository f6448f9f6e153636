//! Correlation-kernel symmetry and quadrature properties.

use fqsd::kernels::weighted_integral;
use fqsd::linalg::C64;
use fqsd::{BathMode, CorrelationKernel};
use proptest::prelude::*;

fn kernel() -> impl Strategy<Value = CorrelationKernel> {
    prop_oneof![
        (0.01..5.0f64, -3.0..3.0f64).prop_map(|(gamma, big_omega)| CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega }),
        (0.01..2.0f64, 0.1..5.0f64).prop_map(|(strength, cutoff)| CorrelationKernel::OhmicZeroT { strength, cutoff }),
        (-2.0..2.0f64, -2.0..2.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, omega_b)| CorrelationKernel::SingleMode { g: C64::new(a, b), omega_b }),
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -3.0..3.0f64), 1..5).prop_map(|ms| {
            CorrelationKernel::DiscreteModes(ms.into_iter().map(|(a, b, w)| BathMode::new(C64::new(a, b), w)).collect())
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hermitian_symmetry(k in kernel(), t in 0.0..20.0f64, s in 0.0..20.0f64) {
        let a = k.eval(s, t).unwrap();
        let b = k.eval(t, s).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
    }

    #[test]
    fn quadrature_is_second_order(
        gamma in 0.2..3.0f64,
        big_omega in -2.0..2.0f64,
        freq in 0.1..2.0f64,
    ) {
        let k = CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega };
        let t: f64 = 2.0;
        let run = |h: f64| {
            let n = (t / h).round() as usize;
            let field: Vec<C64> = (0..=n).map(|j| C64::new((freq * j as f64 * h).cos(), 0.0)).collect();
            weighted_integral(&k, &field, h)
        };
        let h = 0.1;
        let reference = run(h / 16.0);
        let e1 = (run(h) - reference).norm();
        let e2 = (run(h / 2.0) - reference).norm();
        prop_assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }
}

#[test]
fn broad_ou_kernel_concentrates_to_one_half() {
    let t: f64 = 1.0;
    let mut last = f64::INFINITY;
    for gamma in [10.0f64, 100.0, 1000.0] {
        // gamma h ~ gamma^{-1/2}: the quadrature error falls with gamma too.
        let h = 0.1 / (gamma * gamma.sqrt());
        let n = (t / h).round() as usize;
        let ones = vec![C64::from(1.0); n + 1];
        let k = CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega: 0.0 };
        let v = weighted_integral(&k, &ones, h);
        let err = (v - C64::from(0.5)).norm();
        assert!(err < 1.0 / gamma, "gamma {gamma}: {err:e}");
        assert!(err < last);
        last = err;
    }
}
