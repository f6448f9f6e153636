#![allow(dead_code)]

use fqsd::linalg::{CMatrix, C64};
use proptest::prelude::*;

pub fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

pub fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_vec(n, n, v))
}

/// Random full-rank density matrix `G G^dag / Tr`.
pub fn density(n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(n).prop_map(|g| {
        let r = &g * g.adjoint() + CMatrix::identity(g.nrows(), g.nrows()) * C64::from(1e-3);
        let tr = r.trace();
        r / tr
    })
}

pub fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(n).prop_map(|g| (&g + g.adjoint()) * C64::from(0.5))
}

/// Random unitary `exp(i H)`.
pub fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    hermitian(n).prop_map(|h| (h * C64::new(0.0, 1.0)).exp())
}
