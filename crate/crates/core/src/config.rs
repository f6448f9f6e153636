//! TOML run configuration.
//!
//! ```toml
//! [model]
//! model = "two_qubit"          # one_qubit | two_qubit | qbm | n_fermion | n_boson
//! omega_a = 1.0
//! omega_b = 1.0
//! kappa_a = 1.0
//! kappa_b = 1.0
//!
//! [kernel]
//! type = "ohmic"               # ou | ohmic | single_mode | modes
//! strength = 0.2
//! cutoff = 1.0
//!
//! [integrator]
//! T = 10.0
//! h = 0.01
//! coeff_source = "grid"        # grid | closed_form | exponential
//!
//! [initial_state]
//! kind = "bell"                # default | basis | vector | bell | coherent
//!
//! [outputs]
//! name = "two_qubit"
//! observables = ["concurrence", "populations"]
//!
//! [sweep]
//! parameter = "kernel.cutoff"
//! values = [0.5, 1.0, 2.0]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{BathMode, CorrelationKernel};
use crate::linalg::{basis_vector, CVector, C64};
use crate::master::{CoefficientSource, DensityMatrix};
use crate::models::{
    build_n_boson, build_n_fermion, build_one_qubit, build_qbm, build_two_qubit, ModelSpec, TwoQubitParams,
};

fn default_n_max() -> usize {
    30
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    OneQubit {
        omega: f64,
    },
    TwoQubit {
        omega_a: f64,
        omega_b: f64,
        #[serde(default)]
        j_xy: f64,
        #[serde(default)]
        j_z: f64,
        #[serde(default = "one")]
        kappa_a: f64,
        #[serde(default = "one")]
        kappa_b: f64,
    },
    Qbm {
        omega_m: f64,
        #[serde(default = "default_n_max")]
        n_max: usize,
    },
    NFermion {
        energies: Vec<f64>,
    },
    NBoson {
        omega_1: f64,
        omega_2: f64,
    },
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelSpec> {
        let spec = match self {
            ModelConfig::OneQubit { omega } => build_one_qubit(*omega),
            ModelConfig::TwoQubit {
                omega_a,
                omega_b,
                j_xy,
                j_z,
                kappa_a,
                kappa_b,
            } => build_two_qubit(TwoQubitParams {
                omega_a: *omega_a,
                omega_b: *omega_b,
                j_xy: *j_xy,
                j_z: *j_z,
                kappa_a: *kappa_a,
                kappa_b: *kappa_b,
            }),
            ModelConfig::Qbm { omega_m, n_max } => build_qbm(*omega_m, *n_max),
            ModelConfig::NFermion { energies } => build_n_fermion(energies),
            ModelConfig::NBoson { omega_1, omega_2 } => build_n_boson(*omega_1, *omega_2),
        };
        // Parameter problems in a config are config errors.
        spec.map_err(|e| match e {
            Error::Numerical(m) | Error::Domain(m) => Error::Config(m),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub g: f64,
    #[serde(default)]
    pub g_im: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Ou {
        gamma: f64,
        #[serde(default)]
        big_omega: f64,
    },
    Ohmic {
        strength: f64,
        cutoff: f64,
    },
    SingleMode {
        g: f64,
        #[serde(default)]
        g_im: f64,
        omega_b: f64,
    },
    Modes {
        modes: Vec<ModeConfig>,
    },
}

impl KernelConfig {
    pub fn build(&self) -> Result<CorrelationKernel> {
        let k = match self {
            KernelConfig::Ou { gamma, big_omega } => CorrelationKernel::OrnsteinUhlenbeck {
                gamma: *gamma,
                big_omega: *big_omega,
            },
            KernelConfig::Ohmic { strength, cutoff } => CorrelationKernel::OhmicZeroT {
                strength: *strength,
                cutoff: *cutoff,
            },
            KernelConfig::SingleMode { g, g_im, omega_b } => CorrelationKernel::SingleMode {
                g: C64::new(*g, *g_im),
                omega_b: *omega_b,
            },
            KernelConfig::Modes { modes } => CorrelationKernel::DiscreteModes(
                modes
                    .iter()
                    .map(|m| BathMode::new(C64::new(m.g, m.g_im), m.omega))
                    .collect(),
            ),
        };
        k.validate().map_err(|e| Error::config(e.to_string()))?;
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SourceConfig {
    #[default]
    Grid,
    ClosedForm,
    Exponential,
}

impl From<SourceConfig> for CoefficientSource {
    fn from(s: SourceConfig) -> Self {
        match s {
            SourceConfig::Grid => CoefficientSource::Grid,
            SourceConfig::ClosedForm => CoefficientSource::ClosedForm,
            SourceConfig::Exponential => CoefficientSource::Exponential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub h: f64,
    #[serde(default)]
    pub coeff_source: SourceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateConfig {
    /// Per-model default: one qubit `(|e> + |g>)/sqrt 2`, two qubits the
    /// Bell state `(|ee> + |gg>)/sqrt 2`, oscillator the coherent state with
    /// `<q> = 1`, fermions the fully occupied state.
    #[default]
    Default,
    Basis {
        index: usize,
    },
    Vector {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    Bell,
    Coherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
    },
}

/// Coherent state truncated to `n` levels and renormalised.
pub fn coherent_state(alpha: C64, n: usize) -> CVector {
    let mut v = CVector::zeros(n);
    let mut term = C64::from((-0.5 * alpha.norm_sqr()).exp());
    for k in 0..n {
        v[k] = term;
        term = term * alpha / ((k + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v / C64::from(norm)
}

impl InitialStateConfig {
    pub fn build(&self, model: &ModelConfig, dim: usize) -> Result<DensityMatrix> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = match self {
            InitialStateConfig::Default => match model {
                ModelConfig::OneQubit { .. } => CVector::from_vec(vec![C64::from(r), C64::from(r)]),
                ModelConfig::TwoQubit { .. } => bell(),
                ModelConfig::Qbm { .. } => coherent_state(C64::from(r), dim),
                ModelConfig::NFermion { .. } | ModelConfig::NBoson { .. } => basis_vector(dim, dim - 1),
            },
            InitialStateConfig::Basis { index } => {
                if *index >= dim {
                    return Err(Error::config(format!("basis index {index} out of range for dimension {dim}")));
                }
                basis_vector(dim, *index)
            }
            InitialStateConfig::Vector { re, im } => {
                if re.len() != dim || !(im.is_empty() || im.len() == dim) {
                    return Err(Error::config(format!("initial vector must have {dim} entries")));
                }
                CVector::from_iterator(
                    dim,
                    re.iter()
                        .enumerate()
                        .map(|(k, x)| C64::new(*x, im.get(k).copied().unwrap_or(0.0))),
                )
            }
            InitialStateConfig::Bell => {
                if dim != 4 {
                    return Err(Error::config("bell initial state needs the two-qubit model"));
                }
                bell()
            }
            InitialStateConfig::Coherent { alpha_re, alpha_im } => {
                if !matches!(model, ModelConfig::Qbm { .. }) {
                    return Err(Error::config("coherent initial state needs the oscillator model"));
                }
                coherent_state(C64::new(*alpha_re, *alpha_im), dim)
            }
        };
        DensityMatrix::from_pure(&psi)
    }
}

fn bell() -> CVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![C64::from(r), C64::from(0.0), C64::from(0.0), C64::from(r)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Rho,
    Populations,
    Coherence,
    Concurrence,
    MeanQ,
    MeanP,
    Coefficients,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Rho => "rho",
            Observable::Populations => "populations",
            Observable::Coherence => "coherence",
            Observable::Concurrence => "concurrence",
            Observable::MeanQ => "mean_q",
            Observable::MeanP => "mean_p",
            Observable::Coefficients => "coefficients",
        }
    }
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Rho, Observable::Coefficients]
}

fn default_name() -> String {
    "run".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            name: default_name(),
            observables: default_observables(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path into the config, e.g. `kernel.cutoff`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub kernel: KernelConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub initial_state: InitialStateConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

/// Command-line overrides of the integrator block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub h: Option<f64>,
    pub t_final: Option<f64>,
}

/// A parsed config together with its raw TOML, used for sweeps and echoing.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub raw: toml::Table,
    pub config: RunConfig,
}

impl LoadedConfig {
    pub fn from_str(text: &str, overrides: Overrides) -> Result<Self> {
        let mut raw: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config(format!("cannot parse config: {e}")))?;
        if let Some(h) = overrides.h {
            set_path(&mut raw, "integrator.h", h)?;
        }
        if let Some(t) = overrides.t_final {
            set_path(&mut raw, "integrator.T", t)?;
        }
        let config = parse_table(&raw)?;
        Ok(Self { raw, config })
    }

    pub fn from_path(path: &Path, overrides: Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str(&text, overrides)
    }

    /// One `(label, config)` per sweep value, or the config itself.
    pub fn expand(&self) -> Result<Vec<(String, RunConfig)>> {
        match &self.config.sweep {
            None => Ok(vec![(String::new(), self.config.clone())]),
            Some(sweep) => {
                if sweep.values.is_empty() {
                    return Err(Error::config("sweep needs at least one value"));
                }
                sweep
                    .values
                    .iter()
                    .map(|v| {
                        let mut raw = self.raw.clone();
                        set_path(&mut raw, &sweep.parameter, *v)?;
                        let cfg = parse_table(&raw)?;
                        let leaf = sweep.parameter.rsplit('.').next().unwrap_or("value");
                        Ok((format!("{leaf}_{v}"), cfg))
                    })
                    .collect()
            }
        }
    }
}

fn parse_table(raw: &toml::Table) -> Result<RunConfig> {
    let cfg: RunConfig = raw
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| Error::config(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Set a numeric leaf addressed by a dotted path; the leaf must exist or
/// its parent table must.
pub fn set_path(raw: &mut toml::Table, path: &str, value: f64) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    let (leaf, parents) = parts
        .split_last()
        .ok_or_else(|| Error::config("empty parameter path"))?;
    let mut table = raw;
    for p in parents {
        table = table
            .get_mut(*p)
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| Error::config(format!("unknown config section '{p}' in '{path}'")))?;
    }
    let new = match table.get(*leaf) {
        Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        _ => toml::Value::Float(value),
    };
    table.insert(leaf.to_string(), new);
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let IntegratorConfig { t_final, h, .. } = self.integrator;
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::config(format!("integrator.T must be > 0, got {t_final}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::config(format!("integrator.h must be > 0, got {h}")));
        }
        if h > t_final / 10.0 {
            return Err(Error::config(format!(
                "integrator.h = {h} violates h <= T/10 = {}",
                t_final / 10.0
            )));
        }
        crate::qops::TimeGrid::new(t_final, h)?;
        if self.integrator.coeff_source == SourceConfig::ClosedForm
            && !matches!(self.model, ModelConfig::OneQubit { .. })
        {
            return Err(Error::config("coeff_source = closed_form needs the one_qubit model"));
        }
        for obs in &self.outputs.observables {
            let ok = match obs {
                Observable::Concurrence => matches!(self.model, ModelConfig::TwoQubit { .. }),
                Observable::Coherence => matches!(self.model, ModelConfig::OneQubit { .. }),
                Observable::MeanQ | Observable::MeanP => matches!(self.model, ModelConfig::Qbm { .. }),
                _ => true,
            };
            if !ok {
                return Err(Error::config(format!(
                    "observable '{}' is not defined for this model",
                    obs.name()
                )));
            }
        }
        if self.outputs.name.is_empty() || self.outputs.name.contains(['/', '\\']) {
            return Err(Error::config("outputs.name must be a plain file stem"));
        }
        self.kernel.build()?;
        self.model.build()?;
        Ok(())
    }
}
