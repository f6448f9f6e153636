//! `run <config>`: coefficients, master equation, CSVs and a manifest.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LoadedConfig, ModelConfig, Observable, Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::io::{resolve_out_dir, write_json, Cell, CsvTable, FileEntry};
use crate::master::{integrate, Trajectory};
use crate::models::quadratures;
use crate::observables::{concurrence_checked, ObservableReport};
use crate::qops::{solve_bosonic_o, QbarSeries, SolveOptions};

/// Health counters of one run, echoed into the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Invariants {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub unphysical_states: usize,
    pub truncated_at: Option<f64>,
    pub singular_at: Option<f64>,
    /// `max |X_5|` of the bosonic comparison operator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_x5: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub config: RunConfig,
    pub trajectory: Option<Trajectory>,
    pub coefficients: QbarSeries,
    pub observables: ObservableReport,
    pub invariants: Invariants,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct RunRecord<'a> {
    label: &'a str,
    model: &'a ModelConfig,
    t_final: f64,
    h: f64,
    coeff_source: crate::config::SourceConfig,
    invariants: &'a Invariants,
    files: &'a [FileEntry],
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: serde_json::Value,
    runs: Vec<RunRecord<'a>>,
    combined: Vec<FileEntry>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub outcomes: Vec<RunOutcome>,
    pub manifest: FileEntry,
}

/// Execute one config (and its sweep) and write everything under the output directory.
///
/// Files are written even when a run stops at a singular coefficient; the
/// error returned afterwards carries the numerical exit code.
pub fn run_config(path: &Path, overrides: Overrides, out_flag: Option<&Path>) -> Result<RunSummary> {
    let loaded = LoadedConfig::from_path(path, overrides)?;
    run_loaded(&loaded, out_flag)
}

pub fn run_loaded(loaded: &LoadedConfig, out_flag: Option<&Path>) -> Result<RunSummary> {
    let out_dir = resolve_out_dir(out_flag, loaded.config.outputs.dir.as_deref());
    std::fs::create_dir_all(&out_dir)?;
    let name = loaded.config.outputs.name.clone();
    let runs = loaded.expand()?;

    let outcomes: Vec<RunOutcome> = runs
        .into_par_iter()
        .map(|(label, cfg)| execute(label, cfg, &out_dir, &name))
        .collect::<Result<_>>()?;

    let mut combined = Vec::new();
    if outcomes.len() > 1 && loaded.config.outputs.observables.contains(&Observable::Concurrence) {
        combined.push(combined_series(&outcomes, "concurrence")?.write(&out_dir.join(format!("{name}_concurrence.csv")))?);
    }

    let config_json =
        serde_json::to_value(&loaded.raw).map_err(|e| Error::config(format!("cannot echo config: {e}")))?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config_json,
        runs: outcomes
            .iter()
            .map(|o| RunRecord {
                label: &o.label,
                model: &o.config.model,
                t_final: o.config.integrator.t_final,
                h: o.config.integrator.h,
                coeff_source: o.config.integrator.coeff_source,
                invariants: &o.invariants,
                files: &o.files,
            })
            .collect(),
        combined,
    };
    let manifest_entry = write_json(&out_dir.join(format!("{name}_manifest.json")), &manifest)?;

    if let Some(bad) = outcomes.iter().find(|o| o.invariants.truncated_at.is_some()) {
        return Err(Error::numerical(format!(
            "run '{}' stopped at t = {} where the coefficients diverge; outputs written up to that point",
            if bad.label.is_empty() { &name } else { &bad.label },
            bad.invariants.truncated_at.unwrap_or(f64::NAN)
        )));
    }
    Ok(RunSummary {
        out_dir,
        outcomes,
        manifest: manifest_entry,
    })
}

fn stem(name: &str, label: &str) -> String {
    if label.is_empty() {
        name.to_string()
    } else {
        format!("{name}_{label}")
    }
}

/// Run a single (already expanded) config in memory and write its CSVs.
pub fn execute(label: String, cfg: RunConfig, out_dir: &Path, name: &str) -> Result<RunOutcome> {
    let mut outcome = simulate(label, cfg)?;
    let stem = stem(name, &outcome.label);
    if let Some(traj) = &outcome.trajectory {
        let table = trajectory_table(traj, &outcome.config, &outcome.observables)?;
        outcome
            .files
            .push(table.write(&out_dir.join(format!("{stem}_trajectory.csv")))?);
    }
    if outcome.config.outputs.observables.contains(&Observable::Coefficients) {
        let table = coefficient_table(&outcome.coefficients)?;
        outcome
            .files
            .push(table.write(&out_dir.join(format!("{stem}_coefficients.csv")))?);
    }
    Ok(outcome)
}

/// Compute a run without touching the filesystem.
pub fn simulate(label: String, cfg: RunConfig) -> Result<RunOutcome> {
    let model = cfg.model.build()?;
    let kernel = cfg.kernel.build()?;
    let (t_final, h) = (cfg.integrator.t_final, cfg.integrator.h);

    if let ModelConfig::NBoson { omega_1, omega_2 } = cfg.model {
        let grid = solve_bosonic_o(&kernel, omega_1, omega_2, t_final, h, &SolveOptions::default())?;
        let series = grid.series;
        let invariants = Invariants {
            singular_at: series.singular_at.map(|k| series.times[k.min(series.len() - 1)]),
            max_abs_x5: grid.noise.as_ref().map(|n| n.max_abs()),
            ..Invariants::default()
        };
        let observables = ObservableReport::new(series.times.clone());
        return Ok(RunOutcome {
            label,
            config: cfg,
            trajectory: None,
            coefficients: series,
            observables,
            invariants,
            files: Vec::new(),
        });
    }

    let rho0 = cfg.initial_state.build(&cfg.model, model.dim)?;
    let traj = integrate(&model, &kernel, &rho0, t_final, h, cfg.integrator.coeff_source.into())?;
    let coefficients = traj
        .qbar
        .clone()
        .ok_or_else(|| Error::numerical("trajectory carries no coefficient series"))?;

    let mut obs = ObservableReport::new(traj.times.clone());
    for o in &cfg.outputs.observables {
        match o {
            Observable::Concurrence => {
                let mut values = Vec::with_capacity(traj.len());
                for s in &traj.states {
                    let (c, unphysical) = concurrence_checked(&s.rho)?;
                    obs.unphysical_states += usize::from(unphysical);
                    values.push(c);
                }
                obs.add_real("concurrence", values)?;
            }
            Observable::Coherence => obs.add_complex("rho21", traj.entry(1, 0))?,
            Observable::Populations => {
                for k in 0..model.dim {
                    obs.add_real(&format!("pop_{k}"), traj.entry(k, k).iter().map(|z| z.re).collect())?;
                }
            }
            Observable::MeanQ | Observable::MeanP => {
                let (q, p) = quadratures(model.dim);
                let (op, key) = if *o == Observable::MeanQ { (q, "mean_q") } else { (p, "mean_p") };
                obs.add_real(key, traj.expectation(&op).iter().map(|z| z.re).collect())?;
            }
            Observable::Rho | Observable::Coefficients => {}
        }
    }

    let invariants = Invariants {
        max_trace_error: traj.max_trace_error(),
        max_hermiticity_error: traj.max_hermiticity_error(),
        min_eigenvalue: traj.min_eigenvalue(),
        unphysical_states: obs.unphysical_states,
        truncated_at: traj.truncated_at,
        singular_at: coefficients
            .singular_at
            .map(|k| coefficients.times[k.min(coefficients.len() - 1)]),
        max_abs_x5: None,
    };
    Ok(RunOutcome {
        label,
        config: cfg,
        trajectory: Some(traj),
        coefficients,
        observables: obs,
        invariants,
        files: Vec::new(),
    })
}

/// `t`, optional `re/im_rho_i_j`, health columns, then observables.
pub fn trajectory_table(traj: &Trajectory, cfg: &RunConfig, obs: &ObservableReport) -> Result<CsvTable> {
    let dim = traj.last().dim();
    let with_rho = cfg.outputs.observables.contains(&Observable::Rho);
    let mut header = vec!["t".to_string()];
    if with_rho {
        for i in 0..dim {
            for j in 0..dim {
                header.push(format!("re_rho_{i}_{j}"));
                header.push(format!("im_rho_{i}_{j}"));
            }
        }
    }
    header.extend(["trace_err", "herm_err", "min_eig"].map(String::from));
    for k in obs.real.keys() {
        header.push(k.clone());
    }
    for k in obs.complex.keys() {
        header.push(format!("re_{k}"));
        header.push(format!("im_{k}"));
        header.push(format!("abs_{k}"));
    }

    let mut table = CsvTable::new(header);
    for (n, s) in traj.states.iter().enumerate() {
        let mut row: Vec<Cell> = vec![traj.times[n].into()];
        if with_rho {
            for i in 0..dim {
                for j in 0..dim {
                    row.push(s.rho[(i, j)].re.into());
                    row.push(s.rho[(i, j)].im.into());
                }
            }
        }
        row.push(s.trace_error().into());
        row.push(s.hermiticity_error().into());
        row.push(traj.min_eigs[n].into());
        for v in obs.real.values() {
            row.push(v[n].into());
        }
        for v in obs.complex.values() {
            row.push(v[n].re.into());
            row.push(v[n].im.into());
            row.push(v[n].norm().into());
        }
        table.push(row)?;
    }
    Ok(table)
}

/// `t`, `re/im/abs_X{i}` and a `singular` flag per sample.
pub fn coefficient_table(series: &QbarSeries) -> Result<CsvTable> {
    let mut header = vec!["t".to_string()];
    for i in 1..=series.basis_len {
        header.push(format!("re_X{i}"));
        header.push(format!("im_X{i}"));
        header.push(format!("abs_X{i}"));
    }
    header.push("singular".into());
    let mut table = CsvTable::new(header);
    for (k, (t, c)) in series.times.iter().zip(&series.coeffs).enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into()];
        for z in c {
            row.push(z.re.into());
            row.push(z.im.into());
            row.push(z.norm().into());
        }
        row.push(Cell::Flag(series.singular_at.is_some_and(|s| k >= s)));
        table.push(row)?;
    }
    Ok(table)
}

/// One real observable across a sweep, one column per run; short runs pad with NaN.
pub fn combined_series(outcomes: &[RunOutcome], key: &str) -> Result<CsvTable> {
    let longest = outcomes
        .iter()
        .max_by_key(|o| o.observables.times.len())
        .ok_or_else(|| Error::config("empty sweep"))?;
    let mut header = vec!["t".to_string()];
    header.extend(outcomes.iter().map(|o| format!("{key}_{}", o.label)));
    let mut table = CsvTable::new(header);
    for (n, t) in longest.observables.times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into()];
        for o in outcomes {
            let v = o
                .observables
                .real
                .get(key)
                .and_then(|v| v.get(n))
                .copied()
                .unwrap_or(f64::NAN);
            row.push(v.into());
        }
        table.push(row)?;
    }
    Ok(table)
}
