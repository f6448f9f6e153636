//! `verify <suite>`: named numerical checks with pinned tolerances.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{novikov_check, recovery_check};
use crate::kernels::{BathMode, CorrelationKernel};
use crate::linalg::{c, trace_distance, CVector, C64};
use crate::master::{integrate, markov_limit_check, CoefficientSource, DensityMatrix};
use crate::models::{build_one_qubit, ChainBoundary, TwoQubitParams};
use crate::oracle::{chain_equivalence, exact_evolve, CompositeSpec};
use crate::qops::{
    solve_bosonic_o, solve_n_fermion, solve_one_qubit, solve_qbm_zeroth, solve_two_qubit_exact,
    solve_two_qubit_zeroth, OneQubitClosedForm, QbarSeries, SolveOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Novikov,
    Recovery,
    Oracle,
    Chain,
    Symmetry,
    Markov,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Novikov,
        Suite::Recovery,
        Suite::Oracle,
        Suite::Chain,
        Suite::Symmetry,
        Suite::Markov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Novikov => "novikov",
            Suite::Recovery => "recovery",
            Suite::Oracle => "oracle",
            Suite::Chain => "chain",
            Suite::Symmetry => "symmetry",
            Suite::Markov => "markov",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([&Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `measured <= tolerance`
    AtMost,
    /// `measured >= tolerance`
    AtLeast,
    /// `measured < tolerance`
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn new(suite: Suite, check: impl Into<String>, measured: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = measured.is_finite()
            && match comparison {
                Comparison::AtMost => measured <= tolerance,
                Comparison::AtLeast => measured >= tolerance,
                Comparison::Below => measured < tolerance,
            };
        Self {
            suite: suite.name(),
            check: check.into(),
            measured,
            tolerance,
            comparison,
            pass,
            note: String::new(),
        }
    }

    fn at_most(suite: Suite, check: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(suite, check, measured, tolerance, Comparison::AtMost)
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn run_suite(suite: Suite) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::All => {
            let parts: Vec<Result<Vec<Check>>> = Suite::EACH.par_iter().map(|s| checks_for(*s)).collect();
            let mut all = Vec::new();
            for p in parts {
                all.extend(p?);
            }
            all
        }
        s => checks_for(s)?,
    };
    Ok(VerifyReport {
        suite: suite.name(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

fn checks_for(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Novikov => novikov(),
        Suite::Recovery => recovery(),
        Suite::Oracle => oracle(),
        Suite::Chain => chain(),
        Suite::Symmetry => symmetry(),
        Suite::Markov => markov(),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn plus() -> CVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(r, 0.0), c(r, 0.0)])
}

/// Noise identities for a qubit and one resonant mode, `Qbar` from the analytic `X_1`.
fn novikov() -> Result<Vec<Check>> {
    let model = build_one_qubit(1.0)?;
    let modes = [BathMode::real(1.0, 1.0)];
    let cf = OneQubitClosedForm::new(C64::from(1.0), 1.0, 1.0)?;
    let rep = novikov_check(&model, &modes, &plus(), 1e-3, &[0.25, 0.5, 1.0], |t| Ok(cf.x1(t)))?;
    let first = rep.first.iter().copied().fold(0.0, f64::max);
    let second = rep.second.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        Check::at_most(Suite::Novikov, "first identity, t in {0.25, 0.5, 1}", first, 1e-8),
        Check::at_most(Suite::Novikov, "second identity, t in {0.25, 0.5, 1}", second, 1e-8),
    ])
}

/// Grassmann trajectory mean vs. the partial trace of the exact composite state.
fn recovery() -> Result<Vec<Check>> {
    let model = build_one_qubit(1.0)?;
    let psi0 = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let one = [BathMode::real(0.8, 1.5)];
    let two = [BathMode::real(0.6, 1.0), BathMode::new(c(0.3, 0.2), 1.7)];
    Ok(vec![
        Check::at_most(
            Suite::Recovery,
            "M = 1 mean vs partial trace",
            recovery_check(&model, &one, &psi0, 2.0, 1e-3)?,
            1e-6,
        ),
        Check::at_most(
            Suite::Recovery,
            "M = 2 mean vs partial trace",
            recovery_check(&model, &two, &psi0, 2.0, 1e-3)?,
            1e-6,
        ),
    ])
}

/// Master equation with grid coefficients vs. exact system + bath evolution.
pub fn oracle_distance(kernel_modes: &[BathMode], omega: f64, t_final: f64, h: f64) -> Result<(f64, f64)> {
    let model = build_one_qubit(omega)?;
    let kernel = CorrelationKernel::DiscreteModes(kernel_modes.to_vec());
    let psi = plus();
    let rho0 = DensityMatrix::from_pure(&psi)?;
    let traj = integrate(&model, &kernel, &rho0, t_final, h, CoefficientSource::Grid)?;
    if let Some(t) = traj.truncated_at {
        return Err(Error::numerical(format!("coefficients diverge at t = {t}")));
    }
    let spec = CompositeSpec::new(model, kernel_modes.to_vec())?;
    let exact = exact_evolve(&spec, &spec.with_vacuum(&psi)?, t_final, h)?;
    let dist = traj
        .states
        .iter()
        .zip(&exact)
        .map(|(a, b)| trace_distance(&a.rho, &b.rho))
        .fold(0.0, f64::max);
    let min_eig = exact.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min);
    Ok((dist, min_eig))
}

fn three_modes() -> [BathMode; 3] {
    [
        BathMode::real(0.5, 1.5),
        BathMode::new(c(0.3, 0.2), 2.0),
        BathMode::real(0.25, 0.5),
    ]
}

fn oracle() -> Result<Vec<Check>> {
    let (d1, e1) = oracle_distance(&[BathMode::real(0.8, 1.5)], 1.0, 3.0, 1e-3)?;
    let (d3, e3) = oracle_distance(&three_modes(), 1.0, 3.0, 1e-3)?;
    Ok(vec![
        Check::at_most(Suite::Oracle, "single mode g=0.8 w_b=1.5: trace distance", d1, 1e-4),
        Check::at_most(Suite::Oracle, "three modes: trace distance", d3, 1e-4),
        Check::new(
            Suite::Oracle,
            "oracle reduced states: min eigenvalue",
            e1.min(e3),
            -1e-12,
            Comparison::AtLeast,
        ),
    ])
}

fn chain() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [2, 4, 8] {
        let r = chain_equivalence(n, ChainBoundary::Periodic)?;
        out.push(
            Check::at_most(Suite::Chain, format!("N = {n} ring: spectrum vs free fermions"), r.deviation, 1e-10)
                .with_note("single momentum set for all parity sectors"),
        );
        out.push(Check::at_most(
            Suite::Chain,
            format!("N = {n} ring: parity-resolved spectrum"),
            r.parity_resolved_deviation,
            1e-10,
        ));
        out.push(Check::at_most(
            Suite::Chain,
            format!("N = {n} ring: one-excitation block"),
            r.single_excitation_deviation,
            1e-10,
        ));
    }
    Ok(out)
}

fn max_diff(a: &QbarSeries, b: &QbarSeries, ia: usize, ib: usize) -> f64 {
    a.trace(ia)
        .iter()
        .zip(b.trace(ib))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn fig4_kernel() -> CorrelationKernel {
    CorrelationKernel::OrnsteinUhlenbeck {
        gamma: 0.4,
        big_omega: FRAC_PI_4,
    }
}

fn symmetry() -> Result<Vec<Check>> {
    let s = Suite::Symmetry;
    let mut out = Vec::new();

    // Degenerate pair: bosonic operator collapses onto the fermionic one.
    let opts = SolveOptions::default();
    let degenerate = solve_bosonic_o(&fig4_kernel(), 1.0, 1.0, 10.0, 0.01, &opts)?;
    let x34 = degenerate.series.max_abs(2).max(degenerate.series.max_abs(3));
    let x5 = degenerate.noise.as_ref().map(|n| n.max_abs()).unwrap_or(0.0);
    out.push(Check::at_most(s, "w1 = w2: sup |X3|, |X4|", x34, 1e-8));
    out.push(Check::at_most(s, "w1 = w2: sup |X5|", x5, 1e-8));
    let split = solve_bosonic_o(&fig4_kernel(), 2.0, 1.0, 10.0, 0.01, &opts)?;
    out.push(Check::new(
        s,
        "w1 = 2, w2 = 1: max |X3| (bosonic departs)",
        split.series.max_abs(2),
        1e-3,
        Comparison::AtLeast,
    ));

    // Symmetric two-qubit parameters.
    let ohmic = CorrelationKernel::OhmicZeroT {
        strength: 0.3,
        cutoff: 1.0,
    };
    let f = solve_two_qubit_zeroth(&ohmic, TwoQubitParams::symmetric(1.0, 0.5, 0.2), 10.0, 0.01)?;
    let abs_gap = |i: usize, j: usize| {
        f.coeffs
            .iter()
            .map(|c| (c[i].norm() - c[j].norm()).abs())
            .fold(0.0, f64::max)
    };
    out.push(Check::at_most(s, "symmetric qubits: ||F1| - |F2||", abs_gap(0, 1), 1e-10));
    out.push(Check::at_most(s, "symmetric qubits: ||F3| - |F4||", abs_gap(2, 3), 1e-10));

    // Reduction chain.
    let k = CorrelationKernel::OrnsteinUhlenbeck {
        gamma: 2.0,
        big_omega: FRAC_PI_2,
    };
    let one = solve_one_qubit(&k, 1.3, 5.0, 0.01)?;
    let nf = solve_n_fermion(&k, &[1.3], 5.0, 0.01)?;
    out.push(Check::at_most(s, "N-fermion (N = 1) vs one qubit", max_diff(&nf, &one, 0, 0), 1e-10));

    let p = TwoQubitParams {
        omega_a: 1.0,
        omega_b: 0.7,
        j_xy: 0.0,
        j_z: 0.0,
        kappa_a: 1.0,
        kappa_b: 0.0,
    };
    let exact = solve_two_qubit_exact(&k, p, 2.0, 0.01, &opts)?.series;
    let zeroth = solve_two_qubit_zeroth(&k, p, 2.0, 0.01)?;
    let worst = (0..4).map(|i| max_diff(&exact, &zeroth, i, i)).fold(0.0, f64::max);
    out.push(Check::at_most(s, "two-qubit exact (kappa_B = J = 0) vs zeroth order", worst, 1e-10));

    let qbm = solve_qbm_zeroth(&k, 0.0, 5.0, 0.01)?;
    let q0 = solve_one_qubit(&k, 0.0, 5.0, 0.01)?;
    out.push(
        Check::at_most(s, "oscillator (w_m = 0) vs one qubit (w = 0): X1", max_diff(&qbm, &q0, 0, 0), 1e-10)
            .with_note("oscillator X1 obeys a linear equation, the qubit X1 a quadratic one"),
    );
    Ok(out)
}

fn markov() -> Result<Vec<Check>> {
    let model = build_one_qubit(1.0)?;
    let rho0 = DensityMatrix::from_pure(&CVector::from_vec(vec![c(0.6, 0.0), c(0.8, 0.0)]))?;
    let dist = |gamma: f64| {
        let k = CorrelationKernel::OrnsteinUhlenbeck { gamma, big_omega: 0.0 };
        markov_limit_check(&model, &k, &rho0, 5.0, 1e-3, Some(0.5))
    };
    let d100 = dist(100.0)?;
    let d1000 = dist(1000.0)?;
    Ok(vec![
        Check::at_most(Suite::Markov, "gamma = 100: trace distance to Lindblad", d100, 1e-2),
        Check::new(
            Suite::Markov,
            "gamma = 1000: trace distance below the gamma = 100 value",
            d1000,
            d100,
            Comparison::Below,
        ),
    ])
}
