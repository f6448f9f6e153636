//! Time-local master equations
//! `d rho/dt = -i[H_s, rho] + [L, rho Qbar^dagger] + [Qbar rho, L^dagger]`
//! and their constant-rate (Lindblad) limit.

use crate::error::{Error, Result};
use crate::kernels::CorrelationKernel;
use crate::linalg::{
    commutator, hermitian_eigenvalues, hermiticity_error, identity, sandwich_superop, trace, trace_distance,
    unvectorize, vectorize, CMatrix, CVector, C64, I, ONE,
};
use crate::models::{ModelParams, ModelSpec};
use crate::qops::{solve_model, CoefficientMethod, OneQubitClosedForm, QbarSeries, TimeGrid};

/// Tolerance on trace and Hermiticity of an accepted density matrix.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub time: f64,
    pub rho: CMatrix,
}

impl DensityMatrix {
    /// Checked constructor: square, Hermitian and unit trace to [`STATE_TOL`].
    pub fn new(rho: CMatrix, time: f64) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::Dimension {
                expected: rho.nrows(),
                got: rho.ncols(),
            });
        }
        let herm = hermiticity_error(&rho);
        if herm > STATE_TOL {
            return Err(Error::config(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = (trace(&rho) - ONE).norm();
        if tr > STATE_TOL {
            return Err(Error::config(format!("density matrix trace differs from 1 by {tr:e}")));
        }
        Ok(Self { time, rho })
    }

    /// `|psi><psi|` of a normalised copy of `psi`.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::config("initial state vector has zero norm"));
        }
        let v = psi / C64::from(norm);
        Self::new(&v * v.adjoint(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace_error(&self) -> f64 {
        (trace(&self.rho) - ONE).norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.rho)[0]
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        trace(&(&self.rho * op))
    }
}

/// Where the `Qbar` coefficients of a run come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    /// Two-time grid solve, linearly interpolated.
    Grid,
    /// Analytic single-mode qubit coefficient, exponential propagator steps.
    ClosedForm,
    /// Direct ODEs for sum-of-exponential kernels.
    Exponential,
}

/// A master-equation trajectory on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Smallest eigenvalue of each state.
    pub min_eigs: Vec<f64>,
    /// Set when the run stopped early at a flagged coefficient sample.
    pub truncated_at: Option<f64>,
    pub qbar: Option<QbarSeries>,
}

impl Trajectory {
    fn start(h: f64, rho0: &DensityMatrix) -> Self {
        let mut out = Self {
            h,
            times: Vec::new(),
            states: Vec::new(),
            min_eigs: Vec::new(),
            truncated_at: None,
            qbar: None,
        };
        out.push(rho0.rho.clone(), 0.0);
        out
    }

    fn push(&mut self, rho: CMatrix, t: f64) {
        let s = DensityMatrix { time: t, rho };
        self.min_eigs.push(s.min_eigenvalue());
        self.times.push(t);
        self.states.push(s);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn max_trace_error(&self) -> f64 {
        self.states.iter().map(|s| s.trace_error()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states.iter().map(|s| s.hermiticity_error()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `rho[(i, j)](t)` along the trajectory.
    pub fn entry(&self, i: usize, j: usize) -> Vec<C64> {
        self.states.iter().map(|s| s.rho[(i, j)]).collect()
    }

    pub fn expectation(&self, op: &CMatrix) -> Vec<C64> {
        self.states.iter().map(|s| s.expectation(op)).collect()
    }
}

/// Right-hand side of the master equation for a given `Qbar`.
pub fn rhs(model: &ModelSpec, qbar: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    for m in [qbar, rho] {
        if m.nrows() != model.dim || m.ncols() != model.dim {
            return Err(Error::Dimension {
                expected: model.dim,
                got: m.nrows(),
            });
        }
    }
    let coherent = commutator(&model.h_s, rho) * (-I);
    let left = commutator(&model.l, &(rho * qbar.adjoint()));
    let right = commutator(&(qbar * rho), &model.l.adjoint());
    let out = coherent + left + right;
    debug_assert!(
        hermiticity_error(rho) > 1e-8 || hermiticity_error(&out) <= 1e-8 * (1.0 + crate::linalg::max_abs(&out)),
        "generator broke Hermiticity"
    );
    Ok(out)
}

fn check_initial(model: &ModelSpec, rho0: &DensityMatrix) -> Result<()> {
    if rho0.dim() != model.dim {
        return Err(Error::Dimension {
            expected: model.dim,
            got: rho0.dim(),
        });
    }
    DensityMatrix::new(rho0.rho.clone(), rho0.time).map(|_| ())
}

fn ensure_finite(rho: &CMatrix, t: f64) -> Result<()> {
    if rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::numerical(format!("density matrix became non-finite at t = {t}")))
    }
}

/// RK4 integration with a `Qbar(t)` supplier; stops when it returns `None`.
fn integrate_with<F>(model: &ModelSpec, rho0: &DensityMatrix, grid: TimeGrid, mut qbar_at: F) -> Result<Trajectory>
where
    F: FnMut(f64) -> Option<CMatrix>,
{
    check_initial(model, rho0)?;
    let h = grid.h;
    let mut traj = Trajectory::start(h, rho0);
    let mut rho = rho0.rho.clone();
    for k in 0..grid.n {
        let t = k as f64 * h;
        let (q0, q1, q2) = match (qbar_at(t), qbar_at(t + 0.5 * h), qbar_at(t + h)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                traj.truncated_at = Some(t);
                break;
            }
        };
        let k1 = rhs(model, &q0, &rho)?;
        let k2 = rhs(model, &q1, &(&rho + &k1 * C64::from(0.5 * h)))?;
        let k3 = rhs(model, &q1, &(&rho + &k2 * C64::from(0.5 * h)))?;
        let k4 = rhs(model, &q2, &(&rho + &k3 * C64::from(h)))?;
        rho += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(h / 6.0);
        ensure_finite(&rho, t + h)?;
        traj.push(rho.clone(), (k + 1) as f64 * h);
    }
    Ok(traj)
}

/// Integrate with precomputed `Qbar` coefficients (linear interpolation in `t`).
pub fn integrate_series(
    model: &ModelSpec,
    series: &QbarSeries,
    rho0: &DensityMatrix,
    t_final: f64,
    h: f64,
) -> Result<Trajectory> {
    let grid = TimeGrid::new(t_final, h)?;
    let mut traj = integrate_with(model, rho0, grid, |t| series.value_at(t).map(|c| model.assemble(&c)))?;
    traj.qbar = Some(series.clone());
    Ok(traj)
}

/// Full pipeline: coefficients for `model` and `kernel`, then the master equation.
pub fn integrate(
    model: &ModelSpec,
    kernel: &CorrelationKernel,
    rho0: &DensityMatrix,
    t_final: f64,
    h: f64,
    source: CoefficientSource,
) -> Result<Trajectory> {
    match source {
        CoefficientSource::Grid | CoefficientSource::Exponential => {
            let method = if source == CoefficientSource::Grid {
                CoefficientMethod::Grid
            } else {
                CoefficientMethod::Exponential
            };
            let series = solve_model(model, kernel, t_final, h, method)?;
            integrate_series(model, &series, rho0, t_final, h)
        }
        CoefficientSource::ClosedForm => integrate_closed_form(model, kernel, rho0, t_final, h),
    }
}

/// Superoperators `(S, T)` of the `X` and `X*` parts for `Qbar = X q`.
fn dissipator_parts(model: &ModelSpec, q: &CMatrix) -> (CMatrix, CMatrix) {
    let id = identity(model.dim);
    let l = &model.l;
    let ld = l.adjoint();
    let qd = q.adjoint();
    // X:  q rho L^dag - L^dag q rho
    let s = sandwich_superop(q, &ld) - sandwich_superop(&(&ld * q), &id);
    // X*: L rho q^dag - rho q^dag L
    let t = sandwich_superop(l, &qd) - sandwich_superop(&id, &(&qd * l));
    (s, t)
}

/// Resonant-or-detuned single-mode qubit with the analytic coefficient.
///
/// The generator is `L0 + X(t) S + X*(t) T` with commuting parts, so each
/// step is the exact propagator `exp(h L0 + Phi S + Phi* T)` with
/// `Phi = int X dt = -ln(u(t + h) / u(t))`. This stays finite where `X`
/// itself diverges.
pub fn integrate_closed_form(
    model: &ModelSpec,
    kernel: &CorrelationKernel,
    rho0: &DensityMatrix,
    t_final: f64,
    h: f64,
) -> Result<Trajectory> {
    let omega = match model.params {
        ModelParams::OneQubit { omega } => omega,
        _ => return Err(Error::config("closed-form coefficients exist for the one-qubit model only")),
    };
    let cf = OneQubitClosedForm::from_kernel(kernel, omega)?;
    check_initial(model, rho0)?;
    let grid = TimeGrid::new(t_final, h)?;
    let n = model.dim;
    let id = identity(n);
    let l0 = (sandwich_superop(&model.h_s, &id) - sandwich_superop(&id, &model.h_s)) * (-I);
    let (s, t) = dissipator_parts(model, &model.q_basis[0]);
    let l0h = &l0 * C64::from(h);

    let mut traj = Trajectory::start(h, rho0);
    let mut v = vectorize(&rho0.rho);
    for k in 0..grid.n {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        let phi = cf.integral(a, b);
        let gen = &l0h + &s * phi + &t * phi.conj();
        v = gen.exp() * v;
        let rho = unvectorize(&v, n);
        ensure_finite(&rho, b)?;
        traj.push(rho, b);
    }
    traj.qbar = cf.series(t_final, h).ok();
    Ok(traj)
}

/// Constant-rate reference `Qbar = gamma_f L`.
pub fn lindblad_reference(
    model: &ModelSpec,
    gamma_f: f64,
    rho0: &DensityMatrix,
    t_final: f64,
    h: f64,
) -> Result<Trajectory> {
    if !(gamma_f.is_finite() && gamma_f >= 0.0) {
        return Err(Error::domain(format!("Lindblad rate must be >= 0, got {gamma_f}")));
    }
    let grid = TimeGrid::new(t_final, h)?;
    let q = &model.l * C64::from(gamma_f);
    integrate_with(model, rho0, grid, |_| Some(q.clone()))
}

/// Max trace distance between the memory-kernel run and its Lindblad limit.
///
/// `gamma_f` defaults to the real part of `int_0^inf K`; it must be given
/// for kernels without a Markov rate.
pub fn markov_limit_check(
    model: &ModelSpec,
    kernel: &CorrelationKernel,
    rho0: &DensityMatrix,
    t_final: f64,
    h: f64,
    gamma_f: Option<f64>,
) -> Result<f64> {
    if let CorrelationKernel::OrnsteinUhlenbeck { big_omega, .. } = kernel {
        if *big_omega != 0.0 && gamma_f.is_none() {
            return Err(Error::domain("Markov check needs a zero OU centre frequency"));
        }
    }
    let rate = match gamma_f {
        Some(g) => g,
        None => kernel
            .markov_rate()
            .ok_or_else(|| Error::domain("kernel has no Markov rate; pass gamma_f"))?
            .re,
    };
    let source = if kernel.exponential_terms().is_some() {
        CoefficientSource::Exponential
    } else {
        CoefficientSource::Grid
    };
    let nm = integrate(model, kernel, rho0, t_final, h, source)?;
    let lb = lindblad_reference(model, rate, rho0, t_final, h)?;
    if let Some(t) = nm.truncated_at {
        return Err(Error::numerical(format!("memory-kernel run stopped at t = {t}")));
    }
    Ok(nm
        .states
        .iter()
        .zip(&lb.states)
        .map(|(a, b)| trace_distance(&a.rho, &b.rho))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c, zeros};
    use crate::models::{build_one_qubit, build_two_qubit, sigma_minus, TwoQubitParams};
    use std::f64::consts::PI;

    fn plus_state() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5, 0.0)), 0.0).unwrap()
    }

    #[test]
    fn zero_qbar_and_hamiltonian_give_zero_rhs() {
        let mut m = build_one_qubit(0.0).unwrap();
        m.h_s = zeros(2);
        let r = rhs(&m, &zeros(2), &plus_state().rho).unwrap();
        assert_eq!(crate::linalg::max_abs(&r), 0.0);
    }

    #[test]
    fn excited_population_decays_at_twice_re_x() {
        let m = build_one_qubit(1.3).unwrap();
        let x = c(0.7, -0.4);
        let rho = crate::linalg::outer(&basis_vector(2, 0));
        let r = rhs(&m, &(sigma_minus() * x), &rho).unwrap();
        assert!((r[(0, 0)] - C64::from(-2.0 * x.re)).norm() < 1e-15);
    }

    #[test]
    fn coherence_equation() {
        let omega = 0.9;
        let m = build_one_qubit(omega).unwrap();
        let x = c(0.3, 0.8);
        let rho = plus_state().rho;
        let r = rhs(&m, &(sigma_minus() * x), &rho).unwrap();
        let expect = I * omega * rho[(1, 0)] - x.conj() * rho[(1, 0)];
        assert!((r[(1, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = build_one_qubit(1.0).unwrap();
        assert!(matches!(rhs(&m, &zeros(3), &zeros(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn closed_form_follows_cosine_law_through_the_pole() {
        let m = build_one_qubit(1.0).unwrap();
        let k = CorrelationKernel::SingleMode {
            g: C64::from(1.0),
            omega_b: 1.0,
        };
        let traj = integrate_closed_form(&m, &k, &plus_state(), PI, PI / 1000.0).unwrap();
        let mut worst: f64 = 0.0;
        for s in &traj.states {
            let expect = 0.5 * (I * s.time).exp() * s.time.cos();
            worst = worst.max((s.rho[(1, 0)] - expect).norm());
        }
        assert!(worst < 1e-10, "{worst}");
        assert!((traj.last().rho[(1, 0)] - C64::from(0.5)).norm() < 1e-10);
    }

    #[test]
    fn grid_run_truncates_at_the_pole() {
        let m = build_one_qubit(1.0).unwrap();
        let k = CorrelationKernel::SingleMode {
            g: C64::from(1.0),
            omega_b: 1.0,
        };
        let traj = integrate(&m, &k, &plus_state(), 3.0, 1e-2, CoefficientSource::Grid).unwrap();
        let t = traj.truncated_at.unwrap();
        assert!(t < PI / 2.0 && t > 1.4);
    }

    #[test]
    fn decoupled_qubit_rotates_freely() {
        let m = build_one_qubit(2.0).unwrap();
        let k = CorrelationKernel::SingleMode {
            g: C64::from(0.0),
            omega_b: 1.0,
        };
        let traj = integrate(&m, &k, &plus_state(), 2.0, 1e-3, CoefficientSource::Grid).unwrap();
        for s in &traj.states {
            let expect = 0.5 * (I * 2.0 * s.time).exp();
            assert!((s.rho[(1, 0)] - expect).norm() < 1e-10);
            assert!((s.rho[(0, 0)] - C64::from(0.5)).norm() < 1e-14);
        }
    }

    #[test]
    fn lindblad_population_decay() {
        let m = build_one_qubit(1.0).unwrap();
        let rho0 = DensityMatrix::from_pure(&basis_vector(2, 0)).unwrap();
        let traj = lindblad_reference(&m, 0.5, &rho0, 3.0, 1e-3).unwrap();
        for s in &traj.states {
            assert!((s.rho[(0, 0)].re - (-s.time).exp()).abs() < 1e-10);
        }
        assert!(traj.max_trace_error() < 1e-12);
    }

    #[test]
    fn two_qubit_trace_is_preserved() {
        let m = build_two_qubit(TwoQubitParams::symmetric(1.0, 0.2, 0.1)).unwrap();
        let k = CorrelationKernel::OhmicZeroT {
            strength: 0.3,
            cutoff: 2.0,
        };
        let rho0 = DensityMatrix::from_pure(&basis_vector(4, 1)).unwrap();
        let traj = integrate(&m, &k, &rho0, 3.0, 1e-2, CoefficientSource::Grid).unwrap();
        assert!(traj.max_trace_error() < 1e-10);
        assert!(traj.max_hermiticity_error() < 1e-10);
    }

    #[test]
    fn rejects_bad_initial_state() {
        let bad = CMatrix::from_element(2, 2, c(0.6, 0.0));
        assert!(DensityMatrix::new(bad, 0.0).is_err());
    }
}
