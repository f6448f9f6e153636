//! Dense complex linear algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// Largest entrywise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// `max |a - a^dagger|` entrywise.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitize(a));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}

/// Eigen-decomposition of the Hermitian part of `a`: (eigenvalues, eigenvector columns).
pub fn hermitian_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitize(a));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Trace distance `0.5 * ||a - b||_1` for Hermitian arguments.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b))
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
}

/// Principal square root of a Hermitian positive semidefinite matrix
/// (negative eigenvalues are clipped to zero).
pub fn psd_sqrt(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(a);
    let n = a.nrows();
    let mut d = CMatrix::zeros(n, n);
    for (k, v) in vals.iter().enumerate() {
        d[(k, k)] = C64::from(v.max(0.0).sqrt());
    }
    &vecs * d * vecs.adjoint()
}

/// Column-major vectorisation: `vec(A X B) = (B^T kron A) vec(X)`.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Superoperator of `X -> A X B` under column-major vectorisation.
pub fn sandwich_superop(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(a)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

/// Reduced state of the first factor of `sys_dim x env_dim` (system-major ordering).
pub fn partial_trace_env(rho: &CMatrix, sys_dim: usize, env_dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(sys_dim, sys_dim);
    for a in 0..sys_dim {
        for b in 0..sys_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += rho[(a * env_dim + e, b * env_dim + e)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Reduced state of a pure state `psi` on `sys_dim x env_dim`, without forming `|psi><psi|`.
pub fn reduced_from_pure(psi: &CVector, sys_dim: usize, env_dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(sys_dim, sys_dim);
    for a in 0..sys_dim {
        for b in 0..sys_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += psi[a * env_dim + e] * psi[b * env_dim + e].conj();
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Fermionic annihilation operators on `n` modes via Jordan-Wigner.
///
/// Mode `j` is the `j`-th tensor factor (factor 0 is the most significant
/// bit). Each factor uses the local basis `{|0>, |1>}` (empty, occupied), and
/// `a_j = Z^{(0)} ... Z^{(j-1)} sigma^{(j)}` with `Z = diag(1, -1)`.
pub fn jw_annihilators(n: usize) -> Vec<CMatrix> {
    let id = identity(2);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    // |0><1|: lowers occupied -> empty.
    let low = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    (0..n)
        .map(|j| {
            let factors: Vec<CMatrix> = (0..n)
                .map(|k| match k.cmp(&j) {
                    std::cmp::Ordering::Less => z.clone(),
                    std::cmp::Ordering::Equal => low.clone(),
                    std::cmp::Ordering::Greater => id.clone(),
                })
                .collect();
            kron_all(&factors)
        })
        .collect()
}

/// Occupation bit of mode `j` in basis index `idx` of an `n`-mode register.
pub fn occupied(idx: usize, j: usize, n: usize) -> bool {
    (idx >> (n - 1 - j)) & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw_operators_satisfy_car() {
        for n in 1..=4 {
            let a = jw_annihilators(n);
            let dim = 1 << n;
            for i in 0..n {
                for j in 0..n {
                    let aa = anticommutator(&a[i], &a[j]);
                    assert!(max_abs(&aa) < 1e-14);
                    let ad = anticommutator(&a[i], &a[j].adjoint());
                    let expect = if i == j { identity(dim) } else { zeros(dim) };
                    assert!(max_abs_diff(&ad, &expect) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn vectorisation_matches_sandwich() {
        let a = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 0.3 * i as f64));
        let x = CMatrix::from_fn(3, 3, |i, j| c(j as f64, i as f64 * 0.1));
        let direct = &a * &x * &b;
        let via = unvectorize(&(sandwich_superop(&a, &b) * vectorize(&x)), 3);
        assert!(max_abs_diff(&direct, &via) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho_s = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let rho_e = CMatrix::from_row_slice(2, 2, &[c(0.4, 0.0), ZERO, ZERO, c(0.6, 0.0)]);
        let red = partial_trace_env(&kron(&rho_s, &rho_e), 2, 2);
        assert!(max_abs_diff(&red, &rho_s) < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = outer(&basis_vector(2, 0));
        let b = outer(&basis_vector(2, 1));
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
    }
}
