//! System side of each model: Hamiltonian, coupling operator `L` and the
//! operator basis of the Q-ansatz, plus the XX spin chain -> fermion bath
//! mode mapping.
//!
//! Qubit conventions: single-qubit basis `{|e>, |g>}` with
//! `sigma_z = diag(1, -1)` and `sigma_- = |g><e|`; two-qubit basis
//! `{|ee>, |eg>, |ge>, |gg>}` (qubit A is the left tensor factor).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::BathMode;
use crate::linalg::{c, dagger, hermiticity_error, identity, jw_annihilators, kron, CMatrix, C64, ONE, ZERO};

pub const MAX_N_FERMION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    OneQubit,
    TwoQubit,
    Qbm,
    NFermion,
    NBoson,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::OneQubit => "one_qubit",
            ModelKind::TwoQubit => "two_qubit",
            ModelKind::Qbm => "qbm",
            ModelKind::NFermion => "n_fermion",
            ModelKind::NBoson => "n_boson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub j_xy: f64,
    pub j_z: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
}

impl TwoQubitParams {
    /// `omega_A = omega_B = omega`, `kappa_A = kappa_B = 1`.
    pub fn symmetric(omega: f64, j_xy: f64, j_z: f64) -> Self {
        Self {
            omega_a: omega,
            omega_b: omega,
            j_xy,
            j_z,
            kappa_a: 1.0,
            kappa_b: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    OneQubit { omega: f64 },
    TwoQubit(TwoQubitParams),
    Qbm { omega_m: f64, n_max: usize },
    NFermion { energies: Vec<f64> },
    NBoson { omega_1: f64, omega_2: f64 },
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub dim: usize,
    pub h_s: CMatrix,
    pub l: CMatrix,
    /// Operator basis of the Q-ansatz, `Q = sum_i x_i(t, s) q_basis[i]`.
    pub q_basis: Vec<CMatrix>,
    /// Diagonal values `x_i(t, t)`; `sum_i init_i q_basis[i] = L`.
    pub initial_coeffs: Vec<C64>,
}

impl ModelSpec {
    /// `sum_i coeffs[i] q_basis[i]` over the leading `coeffs.len()` basis operators.
    pub fn assemble(&self, coeffs: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (x, q) in coeffs.iter().zip(&self.q_basis) {
            out += q * *x;
        }
        out
    }

    fn check(self) -> Result<Self> {
        let err = hermiticity_error(&self.h_s);
        if err > 1e-12 {
            return Err(Error::numerical(format!("system Hamiltonian not Hermitian ({err:e})")));
        }
        Ok(self)
    }
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `|g><e|` in the `{|e>, |g>}` basis.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

pub fn sigma_plus() -> CMatrix {
    dagger(&sigma_minus())
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn build_one_qubit(omega: f64) -> Result<ModelSpec> {
    if !omega.is_finite() {
        return Err(Error::config("one-qubit omega must be finite"));
    }
    let sm = sigma_minus();
    ModelSpec {
        kind: ModelKind::OneQubit,
        params: ModelParams::OneQubit { omega },
        dim: 2,
        h_s: sigma_z() * C64::from(0.5 * omega),
        l: sm.clone(),
        q_basis: vec![sm],
        initial_coeffs: vec![ONE],
    }
    .check()
}

/// Two-qubit operators `(sigma_-^A, sigma_-^B, sigma_z^A, sigma_z^B)`.
pub fn two_qubit_ops() -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let id = identity(2);
    (
        kron(&sigma_minus(), &id),
        kron(&id, &sigma_minus()),
        kron(&sigma_z(), &id),
        kron(&id, &sigma_z()),
    )
}

/// Qubit swap on the two-qubit space.
pub fn swap_matrix() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    // |ee> |eg> |ge> |gg>
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(i, j)] = ONE;
    }
    s
}

pub fn build_two_qubit(p: TwoQubitParams) -> Result<ModelSpec> {
    let all = [p.omega_a, p.omega_b, p.j_xy, p.j_z, p.kappa_a, p.kappa_b];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("two-qubit parameters must be finite"));
    }
    let (sma, smb, sza, szb) = two_qubit_ops();
    let spa = dagger(&sma);
    let spb = dagger(&smb);
    let h_s = &sza * C64::from(p.omega_a)
        + &szb * C64::from(p.omega_b)
        + (&spa * &smb + &sma * &spb) * C64::from(p.j_xy)
        + (&sza * &szb) * C64::from(p.j_z);
    let l = &sma * C64::from(p.kappa_a) + &smb * C64::from(p.kappa_b);
    let q_basis = vec![
        sma.clone(),
        smb.clone(),
        &sza * &smb,
        &szb * &sma,
        (&sma * &smb) * C64::from(2.0),
    ];
    ModelSpec {
        kind: ModelKind::TwoQubit,
        params: ModelParams::TwoQubit(p),
        dim: 4,
        h_s,
        l,
        q_basis,
        initial_coeffs: vec![C64::from(p.kappa_a), C64::from(p.kappa_b), ZERO, ZERO],
    }
    .check()
}

/// Truncated ladder operator on `{|0>, ..., |n_max - 1>}`.
pub fn fock_annihilator(n_max: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n_max, n_max);
    for n in 1..n_max {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// `(q, p)` with `q = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`, so `[q, p] = i`
/// away from the truncation edge.
pub fn quadratures(n_max: usize) -> (CMatrix, CMatrix) {
    let a = fock_annihilator(n_max);
    let ad = dagger(&a);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * C64::from(s);
    let p = (&a - &ad) * c(0.0, -s);
    (q, p)
}

pub fn build_qbm(omega_m: f64, n_max: usize) -> Result<ModelSpec> {
    if n_max < 2 {
        return Err(Error::config(format!("QBM Fock truncation n_max must be >= 2, got {n_max}")));
    }
    if !omega_m.is_finite() {
        return Err(Error::config("QBM omega_m must be finite"));
    }
    let (q, p) = quadratures(n_max);
    let h_s = (&p * &p + &q * &q) * C64::from(omega_m);
    ModelSpec {
        kind: ModelKind::Qbm,
        params: ModelParams::Qbm { omega_m, n_max },
        dim: n_max,
        h_s: crate::linalg::hermitize(&h_s),
        l: q.clone(),
        q_basis: vec![q, p],
        initial_coeffs: vec![ONE, ZERO],
    }
    .check()
}

/// `N_s` fermions, `H_s = sum_i A_i a_i^dag a_i`, `L = sum_i a_i`.
///
/// The modes are Jordan-Wigner fermions on the system register with local
/// basis `{|0>, |1>}`; for `N_s = 1` this is `A a^dag a`, not the `omega/2 sigma_z`
/// of [`build_one_qubit`].
pub fn build_n_fermion(energies: &[f64]) -> Result<ModelSpec> {
    let n = energies.len();
    if !(1..=MAX_N_FERMION).contains(&n) {
        return Err(Error::config(format!(
            "n_fermion needs 1..={MAX_N_FERMION} modes, got {n}"
        )));
    }
    if energies.iter().any(|a| !a.is_finite()) {
        return Err(Error::config("n_fermion energies must be finite"));
    }
    let a = jw_annihilators(n);
    let dim = 1 << n;
    let mut h_s = CMatrix::zeros(dim, dim);
    let mut l = CMatrix::zeros(dim, dim);
    for (ai, e) in a.iter().zip(energies) {
        h_s += dagger(ai) * ai * C64::from(*e);
        l += ai;
    }
    ModelSpec {
        kind: ModelKind::NFermion,
        params: ModelParams::NFermion {
            energies: energies.to_vec(),
        },
        dim,
        h_s,
        l,
        q_basis: a,
        initial_coeffs: vec![ONE; n],
    }
    .check()
}

/// Two system fermions coupled to a bosonic bath; the basis follows the
/// exact bosonic operator `a1, a2, a1^dag a1 a2, a2^dag a1 a2, a1 a2`.
pub fn build_n_boson(omega_1: f64, omega_2: f64) -> Result<ModelSpec> {
    if !(omega_1.is_finite() && omega_2.is_finite()) {
        return Err(Error::config("n_boson frequencies must be finite"));
    }
    let a = jw_annihilators(2);
    let (a1, a2) = (&a[0], &a[1]);
    let h_s = dagger(a1) * a1 * C64::from(omega_1) + dagger(a2) * a2 * C64::from(omega_2);
    let q_basis = vec![
        a1.clone(),
        a2.clone(),
        dagger(a1) * a1 * a2,
        dagger(a2) * a1 * a2,
        a1 * a2,
    ];
    ModelSpec {
        kind: ModelKind::NBoson,
        params: ModelParams::NBoson { omega_1, omega_2 },
        dim: 4,
        h_s,
        l: a1 + a2,
        q_basis,
        initial_coeffs: vec![ONE, ONE, ZERO, ZERO],
    }
    .check()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBoundary {
    /// Ring; Fourier modes `phi_p = 2 pi p / N`.
    Periodic,
    /// Open chain; standing-wave modes `phi_p = pi p / (N + 1)`.
    Open,
}

/// Effective fermion bath seen by a system attached to site 1 of an XX chain.
#[derive(Debug, Clone)]
pub struct ChainBathSpec {
    pub n_sites: usize,
    pub boundary: ChainBoundary,
    pub modes: Vec<BathMode>,
}

impl ChainBathSpec {
    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }
}

/// Bath modes after Jordan-Wigner + Fourier transformation of an `N`-site XX chain.
///
/// Periodic: `g_p = exp(-i phi_p) / sqrt N`, `omega_p = 2 cos phi_p`,
/// `phi_p = 2 pi p / N` for `p = 0..N`. Open: the site-1 amplitudes of the
/// standing waves, `g_p = sqrt(2/(N+1)) sin phi_p` with `phi_p = pi p/(N+1)`.
pub fn chain_bath_modes(n_sites: usize, boundary: ChainBoundary) -> Result<ChainBathSpec> {
    if n_sites < 2 {
        return Err(Error::config(format!("chain needs at least 2 sites, got {n_sites}")));
    }
    let n = n_sites as f64;
    let modes = match boundary {
        ChainBoundary::Periodic => (0..n_sites)
            .map(|p| {
                let phi = 2.0 * PI * p as f64 / n;
                BathMode::new(C64::from_polar(1.0 / n.sqrt(), -phi), 2.0 * phi.cos())
            })
            .collect(),
        ChainBoundary::Open => (1..=n_sites)
            .map(|p| {
                let phi = PI * p as f64 / (n + 1.0);
                BathMode::real((2.0 / (n + 1.0)).sqrt() * phi.sin(), 2.0 * phi.cos())
            })
            .collect(),
    };
    Ok(ChainBathSpec {
        n_sites,
        boundary,
        modes,
    })
}
