//! Non-Markovian dynamics of open quantum systems coupled to fermionic baths.
//!
//! The crate solves the time-local Q-operator coefficient equations for a
//! handful of model systems, integrates the resulting master equations, and
//! checks the Grassmann-noise formalism at micro scale against exact
//! diagonalization of the full system + bath.
//!
//! Module map:
//!
//! * [`kernels`]: bath correlation functions and kernel-weighted integrals.
//! * [`models`]: system Hamiltonians, coupling operators, Q-ansatz bases,
//!   and the spin-chain bath mapping.
//! * [`qops`]: two-time (and three-time) coefficient solvers producing the
//!   `X_i(t)` traces that build the time-local operator.
//! * [`master`]: master-equation integration and the Lindblad reference.
//! * [`grassmann`]: finite Grassmann algebra, Grassmann trajectories and the
//!   Gaussian (Berezin) statistical mean.
//! * [`oracle`]: exact evolution of small system + bath composites.
//! * [`observables`]: concurrence, expectations and report assembly.
//! * [`config`], [`run`], [`verify`], [`figdata`]: the config-driven CLI layer.

pub mod config;
pub mod error;
pub mod figdata;
pub mod grassmann;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod master;
pub mod models;
pub mod observables;
pub mod oracle;
pub mod qops;
pub mod run;
pub mod verify;

pub use error::{Error, Result};
pub use kernels::{BathMode, CorrelationKernel};
pub use linalg::{CMatrix, C64};
pub use master::{CoefficientSource, DensityMatrix, Trajectory};
pub use models::{ModelKind, ModelParams, ModelSpec};
pub use qops::QbarSeries;
