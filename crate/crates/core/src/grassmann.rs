//! Finite Grassmann algebra and the micro-scale stochastic layer.
//!
//! For `M` bath modes the algebra has `2M` generators: `xi_i*` is generator
//! `i` and `xi_i` is generator `M + i`. An element is a dense coefficient
//! vector over generator subsets; subset bit `g` set means generator `g`
//! appears, and every monomial is stored with its generators in ascending
//! order.

use crate::error::{Error, Result};
use crate::kernels::BathMode;
use crate::linalg::{CMatrix, CVector, C64, I, ONE, ZERO};
use crate::models::ModelSpec;
use crate::oracle::{exact_evolve_full, CompositeSpec};
use crate::qops::TimeGrid;

/// Largest number of bath modes handled by the Grassmann propagator.
pub const MAX_MODES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    n_gen: usize,
    coeffs: Vec<C64>,
}

fn reorder_sign(a: usize, b: usize) -> f64 {
    // (-1)^{#(x in a, y in b, x > y)}
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        swaps += (a >> (y + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl GrassmannElement {
    pub fn zero(n_gen: usize) -> Self {
        Self {
            n_gen,
            coeffs: vec![ZERO; 1 << n_gen],
        }
    }

    pub fn scalar(n_gen: usize, value: C64) -> Self {
        let mut out = Self::zero(n_gen);
        out.coeffs[0] = value;
        out
    }

    /// The generator `g` itself.
    pub fn generator(n_gen: usize, g: usize) -> Result<Self> {
        if g >= n_gen {
            return Err(Error::domain(format!("generator {g} out of range for {n_gen}")));
        }
        let mut out = Self::zero(n_gen);
        out.coeffs[1 << g] = ONE;
        Ok(out)
    }

    /// Element from `(mask, coefficient)` pairs in canonical order.
    pub fn from_terms(n_gen: usize, terms: &[(usize, C64)]) -> Self {
        let mut out = Self::zero(n_gen);
        for &(m, c) in terms {
            out.coeffs[m] += c;
        }
        out
    }

    pub fn n_gen(&self) -> usize {
        self.n_gen
    }

    pub fn coeff(&self, mask: usize) -> C64 {
        self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n_gen == other.n_gen {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.n_gen,
                got: other.n_gen,
            })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n_gen);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if *ca == ZERO {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if *cb == ZERO || a & b != 0 {
                    continue;
                }
                out.coeffs[a | b] += ca * cb * reorder_sign(a, b);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n_gen: self.n_gen,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n_gen: self.n_gen,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn axpy(&mut self, s: C64, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Left derivative: move `g` to the front of each monomial, then drop it.
    pub fn left_derivative(&self, g: usize) -> Result<Self> {
        if g >= self.n_gen {
            return Err(Error::domain(format!("generator {g} out of range for {}", self.n_gen)));
        }
        let bit = 1 << g;
        let mut out = Self::zero(self.n_gen);
        for (m, c) in self.coeffs.iter().enumerate() {
            if m & bit != 0 && *c != ZERO {
                let before = (m & (bit - 1)).count_ones();
                let sign = if before.is_multiple_of(2) { 1.0 } else { -1.0 };
                out.coeffs[m ^ bit] += c * sign;
            }
        }
        Ok(out)
    }

    /// Grade if all nonzero terms share one, else `None`.
    pub fn homogeneous_grade(&self) -> Option<u32> {
        let mut grade = None;
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c != ZERO {
                let g = m.count_ones();
                match grade {
                    None => grade = Some(g),
                    Some(h) if h != g => return None,
                    _ => {}
                }
            }
        }
        Some(grade.unwrap_or(0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Generator layout for `M` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeAlgebra {
    pub modes: usize,
}

impl ModeAlgebra {
    pub fn n_gen(&self) -> usize {
        2 * self.modes
    }

    pub fn xi_star(&self, i: usize) -> usize {
        i
    }

    pub fn xi(&self, i: usize) -> usize {
        self.modes + i
    }

    /// `exp(-sum_i xi_i* xi_i) = prod_i (1 - xi_i* xi_i)`.
    pub fn gaussian_weight(&self) -> GrassmannElement {
        let n = self.n_gen();
        let mut w = GrassmannElement::scalar(n, ONE);
        for i in 0..self.modes {
            let mut f = GrassmannElement::scalar(n, ONE);
            f.coeffs[(1 << self.xi_star(i)) | (1 << self.xi(i))] = -ONE;
            w = w.mul(&f).expect("same algebra");
        }
        w
    }

    /// Gaussian statistical mean, normalised so that the mean of 1 is 1.
    pub fn mean(&self, f: &GrassmannElement) -> Result<C64> {
        let w = self.gaussian_weight();
        let top = (1 << self.n_gen()) - 1;
        Ok(w.mul(f)?.coeffs[top] / w.coeffs[top])
    }

    /// `xi_t* = -i sum_i g_i* exp(i omega_i t) xi_i*`.
    pub fn noise_star(&self, modes: &[BathMode], t: f64) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.n_gen());
        for (i, m) in modes.iter().enumerate() {
            out.coeffs[1 << self.xi_star(i)] = -I * m.g.conj() * (I * m.omega * t).exp();
        }
        out
    }

    /// `xi_t = i sum_i g_i exp(-i omega_i t) xi_i`.
    pub fn noise(&self, modes: &[BathMode], t: f64) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.n_gen());
        for (i, m) in modes.iter().enumerate() {
            out.coeffs[1 << self.xi(i)] = I * m.g * (-I * m.omega * t).exp();
        }
        out
    }
}

/// `psi_t(xi*)`: one Grassmann amplitude per system basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannState {
    pub time: f64,
    pub algebra: ModeAlgebra,
    pub amps: Vec<GrassmannElement>,
}

impl GrassmannState {
    pub fn from_system(psi: &CVector, algebra: ModeAlgebra, time: f64) -> Self {
        let n = algebra.n_gen();
        Self {
            time,
            algebra,
            amps: psi.iter().map(|c| GrassmannElement::scalar(n, *c)).collect(),
        }
    }

    /// Amplitudes read off an interaction-picture composite state.
    ///
    /// The bath state `c_{i1}^dag .. c_{ik}^dag |vac>` (ascending `i`) maps
    /// to the monomial `xi_{i1}* .. xi_{ik}*`.
    pub fn from_composite(psi_tot: &CVector, sys_dim: usize, modes: &[BathMode], time: f64) -> Self {
        let algebra = ModeAlgebra { modes: modes.len() };
        let m = modes.len();
        let bath_dim = 1 << m;
        let mut amps = vec![GrassmannElement::zero(algebra.n_gen()); sys_dim];
        for (a, amp) in amps.iter_mut().enumerate() {
            for bits in 0..bath_dim {
                let mut mask = 0;
                let mut energy = 0.0;
                for (i, mode) in modes.iter().enumerate() {
                    if bits >> (m - 1 - i) & 1 == 1 {
                        mask |= 1 << algebra.xi_star(i);
                        energy += mode.omega;
                    }
                }
                amp.coeffs[mask] = psi_tot[a * bath_dim + bits] * (I * energy * time).exp();
            }
        }
        Self { time, algebra, amps }
    }

    /// Bra amplitudes of `<psi_t(-xi)|`: conjugate, reverse each monomial
    /// and map `xi* -> -xi`.
    pub fn bra_minus_xi(&self) -> Vec<GrassmannElement> {
        let alg = self.algebra;
        self.amps
            .iter()
            .map(|a| {
                let mut out = GrassmannElement::zero(alg.n_gen());
                for (mask, c) in a.coeffs.iter().enumerate() {
                    if *c == ZERO {
                        continue;
                    }
                    let mut target = 0;
                    for i in 0..alg.modes {
                        if mask >> alg.xi_star(i) & 1 == 1 {
                            target |= 1 << alg.xi(i);
                        }
                    }
                    let k = mask.count_ones();
                    let sign = if (k * (k.saturating_sub(1)) / 2 + k) % 2 == 0 { 1.0 } else { -1.0 };
                    out.coeffs[target] += c.conj() * sign;
                }
                out
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// `P_t = |psi_t(xi*)><psi_t(-xi)|` with Grassmann-valued entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticDensity {
    pub dim: usize,
    pub algebra: ModeAlgebra,
    /// Row-major entries.
    pub entries: Vec<GrassmannElement>,
}

impl StochasticDensity {
    pub fn from_state(psi: &GrassmannState) -> Result<Self> {
        let bra = psi.bra_minus_xi();
        let dim = psi.amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in &psi.amps {
            for b in &bra {
                entries.push(a.mul(b)?);
            }
        }
        Ok(Self {
            dim,
            algebra: psi.algebra,
            entries,
        })
    }

    pub fn from_scalar(rho: &CMatrix, algebra: ModeAlgebra) -> Self {
        let n = algebra.n_gen();
        let dim = rho.nrows();
        let entries = (0..dim * dim)
            .map(|q| GrassmannElement::scalar(n, rho[(q / dim, q % dim)]))
            .collect();
        Self { dim, algebra, entries }
    }

    pub fn entry(&self, a: usize, b: usize) -> &GrassmannElement {
        &self.entries[a * self.dim + b]
    }

    /// Left product with a scalar matrix: `(m P)_ab = sum_c m_ac P_cb`.
    pub fn left_matrix(&self, m: &CMatrix) -> Self {
        let mut out = self.clone();
        for a in 0..self.dim {
            for b in 0..self.dim {
                let mut acc = GrassmannElement::zero(self.algebra.n_gen());
                for c in 0..self.dim {
                    acc.axpy(m[(a, c)], self.entry(c, b));
                }
                out.entries[a * self.dim + b] = acc;
            }
        }
        out
    }

    /// Right product with a scalar matrix.
    pub fn right_matrix(&self, m: &CMatrix) -> Self {
        let mut out = self.clone();
        for a in 0..self.dim {
            for b in 0..self.dim {
                let mut acc = GrassmannElement::zero(self.algebra.n_gen());
                for c in 0..self.dim {
                    acc.axpy(m[(c, b)], self.entry(a, c));
                }
                out.entries[a * self.dim + b] = acc;
            }
        }
        out
    }

    /// Entrywise `e P`.
    pub fn left_element(&self, e: &GrassmannElement) -> Result<Self> {
        let entries = self.entries.iter().map(|x| e.mul(x)).collect::<Result<_>>()?;
        Ok(Self { entries, ..self.clone() })
    }

    /// Entrywise `P e`.
    pub fn right_element(&self, e: &GrassmannElement) -> Result<Self> {
        let entries = self.entries.iter().map(|x| x.mul(e)).collect::<Result<_>>()?;
        Ok(Self { entries, ..self.clone() })
    }
}

/// Entrywise Gaussian mean of a Grassmann-valued matrix.
pub fn statistical_mean(p: &StochasticDensity) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(p.dim, p.dim);
    for a in 0..p.dim {
        for b in 0..p.dim {
            out[(a, b)] = p.algebra.mean(p.entry(a, b))?;
        }
    }
    Ok(out)
}

fn qsd_rhs(
    model: &ModelSpec,
    modes: &[BathMode],
    alg: ModeAlgebra,
    t: f64,
    psi: &[GrassmannElement],
) -> Result<Vec<GrassmannElement>> {
    let n = alg.n_gen();
    let dim = model.dim;
    let ld = model.l.adjoint();
    let noise = alg.noise_star(modes, t);
    // sum_i g_i exp(-i omega_i t) d/dxi_i* psi
    let mut memory = vec![GrassmannElement::zero(n); dim];
    for (i, m) in modes.iter().enumerate() {
        let w = m.g * (-I * m.omega * t).exp();
        for (mem, amp) in memory.iter_mut().zip(psi) {
            mem.axpy(w, &amp.left_derivative(alg.xi_star(i))?);
        }
    }
    let noisy: Vec<GrassmannElement> = psi.iter().map(|a| noise.mul(a)).collect::<Result<_>>()?;
    let mut out = vec![GrassmannElement::zero(n); dim];
    for (a, o) in out.iter_mut().enumerate() {
        for b in 0..dim {
            o.axpy(-I * model.h_s[(a, b)], &psi[b]);
            o.axpy(model.l[(a, b)], &noisy[b]);
            o.axpy(-I * ld[(a, b)], &memory[b]);
        }
    }
    Ok(out)
}

/// RK4 propagation of the Grassmann QSD equation from a vacuum bath.
///
/// `d psi/dt = [-i H_s + L xi_t* - i L^dag sum_i g_i e^{-i omega_i t} d/dxi_i*] psi`.
pub fn micro_qsd_propagate(
    model: &ModelSpec,
    modes: &[BathMode],
    psi0: &CVector,
    t_final: f64,
    h: f64,
) -> Result<Vec<GrassmannState>> {
    if modes.is_empty() || modes.len() > MAX_MODES {
        return Err(Error::config(format!(
            "Grassmann propagation supports 1..={MAX_MODES} modes, got {}",
            modes.len()
        )));
    }
    if psi0.len() != model.dim {
        return Err(Error::Dimension {
            expected: model.dim,
            got: psi0.len(),
        });
    }
    let grid = TimeGrid::new(t_final, h)?;
    let alg = ModeAlgebra { modes: modes.len() };
    let mut state = GrassmannState::from_system(psi0, alg, 0.0);
    let mut out = vec![state.clone()];
    let combine = |base: &[GrassmannElement], d: &[GrassmannElement], s: f64| -> Vec<GrassmannElement> {
        base.iter()
            .zip(d)
            .map(|(b, x)| {
                let mut y = b.clone();
                y.axpy(C64::from(s), x);
                y
            })
            .collect()
    };
    for k in 0..grid.n {
        let t = k as f64 * h;
        let y = &state.amps;
        let k1 = qsd_rhs(model, modes, alg, t, y)?;
        let k2 = qsd_rhs(model, modes, alg, t + 0.5 * h, &combine(y, &k1, 0.5 * h))?;
        let k3 = qsd_rhs(model, modes, alg, t + 0.5 * h, &combine(y, &k2, 0.5 * h))?;
        let k4 = qsd_rhs(model, modes, alg, t + h, &combine(y, &k3, h))?;
        let mut next = y.clone();
        for q in 0..next.len() {
            next[q].axpy(C64::from(h / 6.0), &k1[q]);
            next[q].axpy(C64::from(h / 3.0), &k2[q]);
            next[q].axpy(C64::from(h / 3.0), &k3[q]);
            next[q].axpy(C64::from(h / 6.0), &k4[q]);
        }
        state = GrassmannState {
            time: (k + 1) as f64 * h,
            algebra: alg,
            amps: next,
        };
        out.push(state.clone());
    }
    Ok(out)
}

/// Largest entrywise deviation between the Gaussian mean of `P_t` and the
/// exact reduced state, over the whole run.
pub fn recovery_check(model: &ModelSpec, modes: &[BathMode], psi0: &CVector, t_final: f64, h: f64) -> Result<f64> {
    let traj = micro_qsd_propagate(model, modes, psi0, t_final, h)?;
    let spec = CompositeSpec::new(model.clone(), modes.to_vec())?;
    let psi_tot = spec.with_vacuum(&(psi0 / C64::from(psi0.norm())))?;
    let exact = exact_evolve_full(&spec, &psi_tot, t_final, h)?;
    let mut worst: f64 = 0.0;
    for (g, (rho, _)) in traj.iter().zip(&exact) {
        let p = StochasticDensity::from_state(g)?;
        let mean = statistical_mean(&p)? / C64::from(psi0.norm_squared());
        worst = worst.max(crate::linalg::max_abs_diff(&mean, &rho.rho));
    }
    Ok(worst)
}

/// Residuals of both noise identities at the requested sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct NovikovReport {
    pub times: Vec<f64>,
    /// `max |<P xi_t> + Qbar <P>|`-type residual per time, first identity.
    pub first: Vec<f64>,
    /// Same for `<xi_t* P> - <P Qbar^dag>`.
    pub second: Vec<f64>,
}

impl NovikovReport {
    pub fn max_residual(&self) -> f64 {
        self.first
            .iter()
            .chain(&self.second)
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Check `<P_t xi_t> = -<Qbar P_t>` and `<xi_t* P_t> = <P_t Qbar^dag>` for
/// the one-qubit model, whose `Qbar = X_1(t) sigma_-` is noise independent.
///
/// `qbar_coeff(t)` supplies `X_1(t)`.
pub fn novikov_check<F>(
    model: &ModelSpec,
    modes: &[BathMode],
    psi0: &CVector,
    h: f64,
    sample_times: &[f64],
    qbar_coeff: F,
) -> Result<NovikovReport>
where
    F: Fn(f64) -> Result<C64>,
{
    if model.q_basis.len() != 1 {
        return Err(Error::config("noise identities are checked for single-operator Qbar models"));
    }
    let t_final = sample_times.iter().copied().fold(0.0, f64::max);
    let mut times = Vec::new();
    let (mut first, mut second) = (Vec::new(), Vec::new());
    if t_final <= 0.0 {
        for &t in sample_times {
            times.push(t);
            first.push(0.0);
            second.push(0.0);
        }
        return Ok(NovikovReport { times, first, second });
    }
    let n = (t_final / h).round() as usize;
    let h = t_final / n as f64;
    let traj = micro_qsd_propagate(model, modes, psi0, t_final, h)?;
    for &t in sample_times {
        let k = (t / h).round() as usize;
        let state = &traj[k];
        let tk = state.time;
        let alg = state.algebra;
        let p = StochasticDensity::from_state(state)?;
        let qbar = &model.q_basis[0] * qbar_coeff(tk)?;

        let lhs1 = statistical_mean(&p.right_element(&alg.noise(modes, tk))?)?;
        let rhs1 = -statistical_mean(&p.left_matrix(&qbar))?;
        let lhs2 = statistical_mean(&p.left_element(&alg.noise_star(modes, tk))?)?;
        let rhs2 = statistical_mean(&p.right_matrix(&qbar.adjoint()))?;

        times.push(tk);
        first.push(crate::linalg::max_abs_diff(&lhs1, &rhs1));
        second.push(crate::linalg::max_abs_diff(&lhs2, &rhs2));
    }
    Ok(NovikovReport { times, first, second })
}
