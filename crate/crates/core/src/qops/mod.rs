//! Coefficient equations of the time-local `Qbar(t)` operator.
//!
//! Every model writes `Q(t, s) = sum_i x_i(t, s) Q_i` and
//! `Qbar(t) = sum_i X_i(t) Q_i` with `X_i(t) = int_0^t K(t, s) x_i(t, s) ds`.
//! Three routes produce the `X_i(t)` traces:
//!
//! * [`solve_grid`]: method of lines on the two-time field `x_i(t, s_j)`;
//!   works for every kernel.
//! * [`solve_noise_grid`]: the same with the three-time noise coefficient
//!   `x_5(t, s, s')` of the exact two-qubit and bosonic models.
//! * [`solve_exponential`]: closed ODEs for `X_i` when the kernel is a sum
//!   of exponentials (single mode, discrete modes, Ornstein-Uhlenbeck).
//!
//! The resonant single-mode qubit also has an analytic solution,
//! [`OneQubitClosedForm`].

mod exponential;
pub mod systems;
mod three_time;
mod two_time;

use crate::error::{Error, Result};
use crate::kernels::CorrelationKernel;
use crate::linalg::{C64, ZERO};
use crate::models::{ModelParams, ModelSpec, TwoQubitParams};

pub use systems::{
    BosonicPair, CoefficientSystem, NFermionSystem, NoiseCoupledSystem, OneQubitSystem, QbmZeroth,
    TwoQubitExact, TwoQubitZeroth,
};

/// Default divergence threshold on `|X_i|`.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Default cap on the number of steps of the three-time solvers.
pub const THREE_TIME_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub divergence_threshold: f64,
    pub three_time_cap: usize,
    /// Keep the full field `x(t_k, s_j)` every `stride` steps.
    pub record_stride: Option<usize>,
    /// Internal substeps per output step for the exponential route.
    pub substeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            divergence_threshold: DIVERGENCE_THRESHOLD,
            three_time_cap: THREE_TIME_CAP,
            record_stride: None,
            substeps: 1,
        }
    }
}

/// Uniform grid `t_k = k h`, `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub h: f64,
    pub n: usize,
}

impl TimeGrid {
    /// Fails unless `h > 0` divides `t_final > 0` (to relative precision 1e-9).
    pub fn new(t_final: f64, h: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::config(format!("final time must be > 0, got {t_final}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::config(format!("step must be > 0, got {h}")));
        }
        let ratio = t_final / h;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::config(format!(
                "step h = {h} does not divide T = {t_final}"
            )));
        }
        Ok(Self { h, n: n as usize })
    }

    pub fn t_final(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| k as f64 * self.h).collect()
    }
}

/// Traces `X_i(t_k)` of the coefficients of `Qbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct QbarSeries {
    pub h: f64,
    pub times: Vec<f64>,
    /// `coeffs[k][i] = X_i(t_k)`.
    pub coeffs: Vec<Vec<C64>>,
    pub basis_len: usize,
    /// First grid index whose sample tripped the divergence flag; the
    /// series ends there.
    pub singular_at: Option<usize>,
}

impl QbarSeries {
    pub fn new(h: f64, basis_len: usize) -> Self {
        Self {
            h,
            times: Vec::new(),
            coeffs: Vec::new(),
            basis_len,
            singular_at: None,
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<C64>) {
        debug_assert_eq!(values.len(), self.basis_len);
        self.times.push(t);
        self.coeffs.push(values);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_singular(&self) -> bool {
        self.singular_at.is_some()
    }

    /// Last time at which the series is usable (before any flagged sample).
    pub fn valid_until(&self) -> f64 {
        match self.singular_at {
            Some(k) if k > 0 => self.times[k - 1],
            Some(_) => 0.0,
            None => *self.times.last().unwrap_or(&0.0),
        }
    }

    /// Trace of coefficient `i`.
    pub fn trace(&self, i: usize) -> Vec<C64> {
        self.coeffs.iter().map(|c| c[i]).collect()
    }

    /// Linear interpolation in `t`; `None` outside the valid range.
    pub fn value_at(&self, t: f64) -> Option<Vec<C64>> {
        let last = self.valid_until();
        if self.is_empty() || t < -1e-12 || t > last + 1e-9 * self.h.max(1.0) {
            return None;
        }
        let pos = (t / self.h).max(0.0);
        let k = (pos.floor() as usize).min(self.len() - 1);
        let frac = pos - k as f64;
        if frac <= 1e-12 || k + 1 >= self.len() || Some(k + 1) == self.singular_at {
            return Some(self.coeffs[k].clone());
        }
        Some(
            self.coeffs[k]
                .iter()
                .zip(&self.coeffs[k + 1])
                .map(|(a, b)| a * (1.0 - frac) + b * frac)
                .collect(),
        )
    }

    /// Largest `|X_i(t)|` over the series.
    pub fn max_abs(&self, i: usize) -> f64 {
        self.coeffs.iter().map(|c| c[i].norm()).fold(0.0, f64::max)
    }
}

/// Three-time noise coefficient output.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseField {
    /// `big5[k][l] = X_5(t_k, s'_l)` for `l <= k`.
    pub big5: Vec<Vec<C64>>,
    /// `x_5(T, s_j, s'_l)` at the last step, row-major in `(j, l)`.
    pub final_x5: Vec<C64>,
    /// Side length of `final_x5`.
    pub final_dim: usize,
    /// Recorded `x_5(t_k, ., .)` snapshots, row-major, keyed by `k`.
    pub snapshots: Vec<(usize, Vec<C64>)>,
}

impl NoiseField {
    pub fn max_abs(&self) -> f64 {
        self.big5
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Output of the grid solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    pub h: f64,
    pub n_fields: usize,
    pub series: QbarSeries,
    /// `x(T, s_j)` at the last completed step, `final_x[j][i]`.
    pub final_x: Vec<Vec<C64>>,
    /// Recorded slices `(k, x(t_k, s_j))`.
    pub slices: Vec<(usize, Vec<Vec<C64>>)>,
    pub noise: Option<NoiseField>,
}

pub(crate) fn flag_sample(values: &[C64], h: f64, threshold: f64) -> bool {
    values
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()) || z.norm() > threshold || z.norm() * h > 0.5)
}

/// Method-of-lines solve of a two-time coefficient system.
pub fn solve_grid<S: CoefficientSystem + ?Sized>(
    system: &S,
    kernel: &CorrelationKernel,
    t_final: f64,
    h: f64,
    opts: &SolveOptions,
) -> Result<CoefficientGrid> {
    kernel.validate()?;
    let grid = TimeGrid::new(t_final, h)?;
    Ok(two_time::solve(system, kernel, grid, opts))
}

/// Grid solve of a system carrying a three-time noise coefficient.
pub fn solve_noise_grid<S: NoiseCoupledSystem + Sync + ?Sized>(
    system: &S,
    kernel: &CorrelationKernel,
    t_final: f64,
    h: f64,
    opts: &SolveOptions,
) -> Result<CoefficientGrid> {
    kernel.validate()?;
    let grid = TimeGrid::new(t_final, h)?;
    if grid.n > opts.three_time_cap {
        return Err(Error::config(format!(
            "three-time solve needs {} steps, above the cap of {}; use a larger h",
            grid.n, opts.three_time_cap
        )));
    }
    Ok(three_time::solve(system, kernel, grid, opts))
}

/// Direct integration of the `X_i` ODEs for sum-of-exponential kernels.
pub fn solve_exponential<S: CoefficientSystem + ?Sized>(
    system: &S,
    kernel: &CorrelationKernel,
    t_final: f64,
    h: f64,
    opts: &SolveOptions,
) -> Result<QbarSeries> {
    kernel.validate()?;
    let grid = TimeGrid::new(t_final, h)?;
    let terms = kernel.exponential_terms().ok_or_else(|| {
        Error::config("exponential coefficient route needs a sum-of-exponentials kernel")
    })?;
    Ok(exponential::solve(system, &terms, grid, opts))
}

/// Substeps that keep the exponential route resolved for fast kernels.
pub fn exponential_substeps(kernel: &CorrelationKernel, h: f64) -> usize {
    let fastest = kernel
        .exponential_terms()
        .map(|ts| ts.iter().map(|t| t.rate.norm()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    ((fastest * h / 0.05).ceil() as usize).max(1)
}

pub fn solve_one_qubit(kernel: &CorrelationKernel, omega: f64, t_final: f64, h: f64) -> Result<QbarSeries> {
    Ok(solve_grid(&OneQubitSystem { omega }, kernel, t_final, h, &SolveOptions::default())?.series)
}

/// `X_1` from its Riccati-type ODE (exponential kernels only).
pub fn solve_one_qubit_riccati(
    kernel: &CorrelationKernel,
    omega: f64,
    t_final: f64,
    h: f64,
) -> Result<QbarSeries> {
    let opts = SolveOptions {
        substeps: exponential_substeps(kernel, h),
        ..SolveOptions::default()
    };
    solve_exponential(&OneQubitSystem { omega }, kernel, t_final, h, &opts)
}

pub fn solve_two_qubit_zeroth(
    kernel: &CorrelationKernel,
    p: TwoQubitParams,
    t_final: f64,
    h: f64,
) -> Result<QbarSeries> {
    Ok(solve_grid(&TwoQubitZeroth { p }, kernel, t_final, h, &SolveOptions::default())?.series)
}

pub fn solve_two_qubit_exact(
    kernel: &CorrelationKernel,
    p: TwoQubitParams,
    t_final: f64,
    h: f64,
    opts: &SolveOptions,
) -> Result<CoefficientGrid> {
    solve_noise_grid(&TwoQubitExact { p }, kernel, t_final, h, opts)
}

pub fn solve_qbm_zeroth(kernel: &CorrelationKernel, omega_m: f64, t_final: f64, h: f64) -> Result<QbarSeries> {
    Ok(solve_grid(&QbmZeroth { omega_m }, kernel, t_final, h, &SolveOptions::default())?.series)
}

pub fn solve_n_fermion(kernel: &CorrelationKernel, energies: &[f64], t_final: f64, h: f64) -> Result<QbarSeries> {
    if energies.is_empty() || energies.len() > 6 {
        return Err(Error::config(format!(
            "N-fermion model supports 1..=6 modes, got {}",
            energies.len()
        )));
    }
    let sys = NFermionSystem {
        energies: energies.to_vec(),
    };
    Ok(solve_grid(&sys, kernel, t_final, h, &SolveOptions::default())?.series)
}

/// Coefficients `X_1..X_4` and the noise field `X_5` of the bosonic operator.
pub fn solve_bosonic_o(
    kernel: &CorrelationKernel,
    omega_1: f64,
    omega_2: f64,
    t_final: f64,
    h: f64,
    opts: &SolveOptions,
) -> Result<CoefficientGrid> {
    let sys = BosonicPair {
        omega_a: omega_1,
        omega_b: omega_2,
    };
    solve_noise_grid(&sys, kernel, t_final, h, opts)
}

/// How the `Qbar` coefficients of a master-equation run are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMethod {
    Grid,
    Exponential,
}

/// Noise-independent `Qbar` coefficients for a model, ready for the master equation.
///
/// The two-qubit model uses its zeroth-order operator; the bosonic model
/// has no deterministic master equation here and is rejected.
pub fn solve_model(
    spec: &ModelSpec,
    kernel: &CorrelationKernel,
    t_final: f64,
    h: f64,
    method: CoefficientMethod,
) -> Result<QbarSeries> {
    let system: Box<dyn CoefficientSystem> = match &spec.params {
        ModelParams::OneQubit { omega } => Box::new(OneQubitSystem { omega: *omega }),
        ModelParams::TwoQubit(p) => Box::new(TwoQubitZeroth { p: *p }),
        ModelParams::Qbm { omega_m, .. } => Box::new(QbmZeroth { omega_m: *omega_m }),
        ModelParams::NFermion { energies } => Box::new(NFermionSystem {
            energies: energies.clone(),
        }),
        ModelParams::NBoson { .. } => {
            return Err(Error::config(
                "the bosonic comparison model has no deterministic master equation; use solve_bosonic_o",
            ))
        }
    };
    match method {
        CoefficientMethod::Grid => Ok(solve_grid(system.as_ref(), kernel, t_final, h, &SolveOptions::default())?.series),
        CoefficientMethod::Exponential => {
            let opts = SolveOptions {
                substeps: exponential_substeps(kernel, h),
                ..SolveOptions::default()
            };
            solve_exponential(system.as_ref(), kernel, t_final, h, &opts)
        }
    }
}

/// Analytic `X_1` of a qubit coupled to one bath mode.
///
/// With `X_1 = -u'/u`, `u'' - i delta u' + |g|^2 u = 0`, `u(0) = 1`,
/// `u'(0) = 0` and `delta = omega - omega_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitClosedForm {
    r1: C64,
    r2: C64,
}

impl OneQubitClosedForm {
    pub fn new(g: C64, omega_b: f64, omega: f64) -> Result<Self> {
        if g.norm_sqr() == 0.0 {
            return Err(Error::domain("closed form needs a nonzero coupling"));
        }
        let delta = omega - omega_b;
        let big_delta = (delta * delta + 4.0 * g.norm_sqr()).sqrt();
        Ok(Self {
            r1: C64::new(0.0, 0.5 * (delta + big_delta)),
            r2: C64::new(0.0, 0.5 * (delta - big_delta)),
        })
    }

    /// Build from a single-mode kernel.
    pub fn from_kernel(kernel: &CorrelationKernel, omega: f64) -> Result<Self> {
        match kernel {
            CorrelationKernel::SingleMode { g, omega_b } => Self::new(*g, *omega_b, omega),
            CorrelationKernel::DiscreteModes(m) if m.len() == 1 => Self::new(m[0].g, m[0].omega, omega),
            _ => Err(Error::config("closed-form coefficients need a single-mode kernel")),
        }
    }

    pub fn u(&self, t: f64) -> C64 {
        let (r1, r2) = (self.r1, self.r2);
        (r2 * (r1 * t).exp() - r1 * (r2 * t).exp()) / (r2 - r1)
    }

    pub fn du(&self, t: f64) -> C64 {
        let (r1, r2) = (self.r1, self.r2);
        r1 * r2 * ((r1 * t).exp() - (r2 * t).exp()) / (r2 - r1)
    }

    /// `X_1(t)`; infinite at zeros of `u`.
    pub fn x1(&self, t: f64) -> C64 {
        -self.du(t) / self.u(t)
    }

    /// `int_a^b X_1 dt` on the branch fixed by `exp(-result) = u(b) / u(a)`.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        -(self.u(b) / self.u(a)).ln()
    }

    /// The closed form sampled on a grid, flagged like the numerical routes.
    pub fn series(&self, t_final: f64, h: f64) -> Result<QbarSeries> {
        let grid = TimeGrid::new(t_final, h)?;
        let mut out = QbarSeries::new(h, 1);
        for t in grid.times() {
            let x = self.x1(t);
            out.push(t, vec![x]);
            if flag_sample(&[x], h, DIVERGENCE_THRESHOLD) {
                out.singular_at = Some(out.len() - 1);
                break;
            }
        }
        Ok(out)
    }
}

/// Zero vector of length `n`.
pub(crate) fn zero_vec(n: usize) -> Vec<C64> {
    vec![ZERO; n]
}
