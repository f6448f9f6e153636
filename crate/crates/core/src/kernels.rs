//! Bath correlation functions `K(t, s)` and kernel-weighted time integrals.
//!
//! Every kernel here is stationary: it depends on the lag `tau = t - s` only
//! and obeys `K(-tau) = conj(K(tau))`. The solvers only ever need `tau >= 0`;
//! negative lags are defined through the conjugate symmetry.

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// One discrete bath mode: coupling `g` and frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub g: C64,
    pub omega: f64,
}

impl BathMode {
    pub fn new(g: C64, omega: f64) -> Self {
        Self { g, omega }
    }

    pub fn real(g: f64, omega: f64) -> Self {
        Self {
            g: C64::from(g),
            omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationKernel {
    /// `sum_i |g_i|^2 exp(-i omega_i tau)`.
    DiscreteModes(Vec<BathMode>),
    /// `|g|^2 exp(-i omega_b tau)`.
    SingleMode { g: C64, omega_b: f64 },
    /// `(gamma / 2) exp(-(gamma + i big_omega) tau)` for `tau >= 0`.
    OrnsteinUhlenbeck { gamma: f64, big_omega: f64 },
    /// Zero-temperature Ohmic bath, `strength / (1/cutoff + i tau)^2`.
    OhmicZeroT { strength: f64, cutoff: f64 },
}

/// `amplitude * exp(-rate * tau)`, one term of a sum-of-exponentials kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub amplitude: C64,
    pub rate: C64,
}

impl CorrelationKernel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationKernel::DiscreteModes(modes) => {
                if modes.is_empty() {
                    return Err(Error::domain("discrete-mode kernel needs at least one mode"));
                }
                for m in modes {
                    if !(m.g.re.is_finite() && m.g.im.is_finite() && m.omega.is_finite()) {
                        return Err(Error::domain("bath mode parameters must be finite"));
                    }
                }
            }
            CorrelationKernel::SingleMode { g, omega_b } => {
                if !(g.re.is_finite() && g.im.is_finite() && omega_b.is_finite()) {
                    return Err(Error::domain("single-mode parameters must be finite"));
                }
            }
            CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega } => {
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::domain(format!("OU gamma must be > 0, got {gamma}")));
                }
                if !big_omega.is_finite() {
                    return Err(Error::domain("OU centre frequency must be finite"));
                }
            }
            CorrelationKernel::OhmicZeroT { strength, cutoff } => {
                if !(strength.is_finite() && *strength > 0.0) {
                    return Err(Error::domain(format!("Ohmic strength must be > 0, got {strength}")));
                }
                if !(cutoff.is_finite() && *cutoff > 0.0) {
                    return Err(Error::domain(format!("Ohmic cutoff must be > 0, got {cutoff}")));
                }
            }
        }
        Ok(())
    }

    /// `K(t, s)`.
    pub fn eval(&self, t: f64, s: f64) -> Result<C64> {
        if !(t.is_finite() && s.is_finite()) {
            return Err(Error::domain(format!("kernel evaluated at non-finite time ({t}, {s})")));
        }
        Ok(self.lag(t - s))
    }

    /// `K` as a function of the lag `tau = t - s`.
    pub fn lag(&self, tau: f64) -> C64 {
        if tau < 0.0 {
            return self.lag(-tau).conj();
        }
        match self {
            CorrelationKernel::DiscreteModes(modes) => modes
                .iter()
                .map(|m| m.g.norm_sqr() * C64::new(0.0, -m.omega * tau).exp())
                .sum(),
            CorrelationKernel::SingleMode { g, omega_b } => {
                g.norm_sqr() * C64::new(0.0, -omega_b * tau).exp()
            }
            CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega } => {
                0.5 * gamma * C64::new(-gamma * tau, -big_omega * tau).exp()
            }
            CorrelationKernel::OhmicZeroT { strength, cutoff } => {
                let d = C64::new(1.0 / cutoff, tau);
                C64::from(*strength) / (d * d)
            }
        }
    }

    /// Sum-of-exponentials form, when the kernel has one.
    ///
    /// Such kernels admit closed ODEs for the weighted integrals `X_i(t)`,
    /// which the solvers use as an independent second route.
    pub fn exponential_terms(&self) -> Option<Vec<ExpTerm>> {
        match self {
            CorrelationKernel::DiscreteModes(modes) => Some(
                modes
                    .iter()
                    .map(|m| ExpTerm {
                        amplitude: C64::from(m.g.norm_sqr()),
                        rate: C64::new(0.0, m.omega),
                    })
                    .collect(),
            ),
            CorrelationKernel::SingleMode { g, omega_b } => Some(vec![ExpTerm {
                amplitude: C64::from(g.norm_sqr()),
                rate: C64::new(0.0, *omega_b),
            }]),
            CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega } => Some(vec![ExpTerm {
                amplitude: C64::from(0.5 * gamma),
                rate: C64::new(*gamma, *big_omega),
            }]),
            CorrelationKernel::OhmicZeroT { .. } => None,
        }
    }

    /// Bath modes, for kernels that come from a finite set of modes.
    pub fn modes(&self) -> Option<Vec<BathMode>> {
        match self {
            CorrelationKernel::DiscreteModes(m) => Some(m.clone()),
            CorrelationKernel::SingleMode { g, omega_b } => Some(vec![BathMode::new(*g, *omega_b)]),
            _ => None,
        }
    }

    /// Markov-limit rate `int_0^inf K(tau) d tau`, where it converges.
    pub fn markov_rate(&self) -> Option<C64> {
        match self {
            CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega } => {
                Some(0.5 * gamma / C64::new(*gamma, *big_omega))
            }
            // int_0^inf Gamma / (1/wc + i tau)^2 = Gamma / (i * (1/wc)) = -i Gamma wc
            CorrelationKernel::OhmicZeroT { strength, cutoff } => {
                Some(C64::new(0.0, -strength * cutoff))
            }
            _ => None,
        }
    }
}

/// Kernel values on the half-step lag lattice `K(m h / 2)`, `m = 0..=2n+2`.
///
/// The two-time solvers need lags `t_k - s_j` on the grid and half a step
/// off it (RK4 midpoints); tabulating both makes every evaluation a lookup.
#[derive(Debug, Clone)]
pub struct KernelTable {
    h: f64,
    half: Vec<C64>,
}

impl KernelTable {
    pub fn new(kernel: &CorrelationKernel, h: f64, n_steps: usize) -> Self {
        let half = (0..=2 * n_steps + 2)
            .map(|m| kernel.lag(0.5 * h * m as f64))
            .collect();
        Self { h, half }
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// `K(m h)`.
    #[inline]
    pub fn at(&self, m: usize) -> C64 {
        self.half[2 * m]
    }

    /// `K(m h / 2)`.
    #[inline]
    pub fn at_half(&self, m2: usize) -> C64 {
        self.half[m2]
    }
}

/// Trapezoid weights on `n + 1` uniform nodes spanning `[0, n h]`.
pub fn trapezoid_weight(j: usize, n: usize, h: f64) -> f64 {
    if n == 0 {
        0.0
    } else if j == 0 || j == n {
        0.5 * h
    } else {
        h
    }
}

/// Composite-trapezoid approximation of `int_0^t K(t, s) field(s) ds`.
///
/// `field[j]` samples the integrand factor at `s_j = j h`, and
/// `t = (field.len() - 1) h`. An empty or single-point field gives zero.
pub fn weighted_integral(kernel: &CorrelationKernel, field: &[C64], h: f64) -> C64 {
    if field.len() < 2 {
        return ZERO;
    }
    let n = field.len() - 1;
    let t = n as f64 * h;
    field
        .iter()
        .enumerate()
        .map(|(j, f)| trapezoid_weight(j, n, h) * kernel.lag(t - j as f64 * h) * f)
        .sum()
}
