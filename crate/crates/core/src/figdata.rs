//! `figdata <fig> <config>`: series behind the four standard figures.
//!
//! * `fig1`: two-qubit concurrence for several Ohmic cutoffs (default 0.5, 1, 2).
//! * `fig2`: `|F_1..F_4|` of the two-qubit operator.
//! * `fig3`: oscillator `<q>` for several OU rates (default 0.5, 2, 8).
//! * `fig4`: `|X_1..X_4|` for a fermion pair in a fermionic and a bosonic bath.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{KernelConfig, LoadedConfig, ModelConfig, Observable, Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::io::{resolve_out_dir, write_json, Cell, CsvTable, FileEntry};
use crate::qops::{solve_bosonic_o, solve_n_fermion, solve_two_qubit_zeroth, SolveOptions};
use crate::run::simulate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            _ => Err(Error::config(format!("unknown figure '{s}' (fig1..fig4)"))),
        }
    }
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

pub const FIG1_CUTOFFS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG3_GAMMAS: [f64; 3] = [0.5, 2.0, 8.0];

#[derive(Debug, Clone)]
pub struct FigureData {
    pub figure: Figure,
    pub table: CsvTable,
}

#[derive(Debug, Clone)]
pub struct FigSummary {
    pub out_dir: PathBuf,
    pub data: FigureData,
    pub files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct FigManifest<'a> {
    tool: &'static str,
    version: &'static str,
    figure: Figure,
    config: serde_json::Value,
    files: &'a [FileEntry],
}

pub fn figdata(fig: Figure, config: &Path, overrides: Overrides, out_flag: Option<&Path>) -> Result<FigSummary> {
    let loaded = LoadedConfig::from_path(config, overrides)?;
    figdata_loaded(fig, &loaded, out_flag)
}

pub fn figdata_loaded(fig: Figure, loaded: &LoadedConfig, out_flag: Option<&Path>) -> Result<FigSummary> {
    let data = compute(fig, loaded)?;
    let out_dir = resolve_out_dir(out_flag, loaded.config.outputs.dir.as_deref());
    std::fs::create_dir_all(&out_dir)?;
    let mut files = vec![data.table.write(&out_dir.join(format!("{}.csv", fig.name())))?];
    let manifest = FigManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        figure: fig,
        config: serde_json::to_value(&loaded.raw).map_err(|e| Error::config(e.to_string()))?,
        files: &files,
    };
    let m = write_json(&out_dir.join(format!("{}_manifest.json", fig.name())), &manifest)?;
    files.push(m);
    Ok(FigSummary { out_dir, data, files })
}

/// Sweep values: the config's `[sweep]` if it targets `param`, else the defaults.
fn sweep_values(loaded: &LoadedConfig, param: &str, defaults: &[f64]) -> Vec<f64> {
    match &loaded.config.sweep {
        Some(s) if s.parameter == param && !s.values.is_empty() => s.values.clone(),
        _ => defaults.to_vec(),
    }
}

fn base(loaded: &LoadedConfig) -> RunConfig {
    let mut cfg = loaded.config.clone();
    cfg.sweep = None;
    cfg
}

pub fn compute(fig: Figure, loaded: &LoadedConfig) -> Result<FigureData> {
    let table = match fig {
        Figure::Fig1 => fig1(loaded)?,
        Figure::Fig2 => fig2(loaded)?,
        Figure::Fig3 => fig3(loaded)?,
        Figure::Fig4 => fig4(loaded)?,
    };
    Ok(FigureData { figure: fig, table })
}

fn columns_table(times: &[f64], names: Vec<String>, cols: &[Vec<f64>]) -> Result<CsvTable> {
    let mut header = vec!["t".to_string()];
    header.extend(names);
    let mut table = CsvTable::new(header);
    for (n, t) in times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(cols.iter().map(|c| Cell::Num(c.get(n).copied().unwrap_or(f64::NAN))));
        table.push(row)?;
    }
    Ok(table)
}

fn fig1(loaded: &LoadedConfig) -> Result<CsvTable> {
    let cfg = base(loaded);
    if !matches!(cfg.model, ModelConfig::TwoQubit { .. }) {
        return Err(Error::config("fig1 needs the two_qubit model"));
    }
    let strength = match cfg.kernel {
        KernelConfig::Ohmic { strength, .. } => strength,
        _ => return Err(Error::config("fig1 needs an ohmic kernel")),
    };
    let cutoffs = sweep_values(loaded, "kernel.cutoff", &FIG1_CUTOFFS);
    let series: Vec<(Vec<f64>, Vec<f64>)> = cutoffs
        .par_iter()
        .map(|wc| {
            let mut c = cfg.clone();
            c.kernel = KernelConfig::Ohmic { strength, cutoff: *wc };
            c.outputs.observables = vec![Observable::Concurrence];
            let o = simulate(String::new(), c)?;
            let conc = o.observables.real.get("concurrence").cloned().unwrap_or_default();
            Ok((o.observables.times, conc))
        })
        .collect::<Result<_>>()?;
    let times = longest(series.iter().map(|s| &s.0));
    let names = cutoffs.iter().map(|w| format!("concurrence_wc_{w}")).collect();
    let cols: Vec<Vec<f64>> = series.into_iter().map(|s| s.1).collect();
    columns_table(&times, names, &cols)
}

fn longest<'a>(it: impl Iterator<Item = &'a Vec<f64>>) -> Vec<f64> {
    it.max_by_key(|v| v.len()).cloned().unwrap_or_default()
}

fn fig2(loaded: &LoadedConfig) -> Result<CsvTable> {
    let cfg = base(loaded);
    let p = match cfg.model.build()?.params {
        crate::models::ModelParams::TwoQubit(p) => p,
        _ => return Err(Error::config("fig2 needs the two_qubit model")),
    };
    let kernel = cfg.kernel.build()?;
    let f = solve_two_qubit_zeroth(&kernel, p, cfg.integrator.t_final, cfg.integrator.h)?;
    let mut names = Vec::new();
    let mut cols = Vec::new();
    for i in 0..4 {
        let tr = f.trace(i);
        names.push(format!("abs_F{}", i + 1));
        cols.push(tr.iter().map(|z| z.norm()).collect());
        names.push(format!("re_F{}", i + 1));
        cols.push(tr.iter().map(|z| z.re).collect());
        names.push(format!("im_F{}", i + 1));
        cols.push(tr.iter().map(|z| z.im).collect());
    }
    columns_table(&f.times, names, &cols)
}

fn fig3(loaded: &LoadedConfig) -> Result<CsvTable> {
    let cfg = base(loaded);
    if !matches!(cfg.model, ModelConfig::Qbm { .. }) {
        return Err(Error::config("fig3 needs the qbm model"));
    }
    let big_omega = match cfg.kernel {
        KernelConfig::Ou { big_omega, .. } => big_omega,
        _ => return Err(Error::config("fig3 needs an ou kernel")),
    };
    let gammas = sweep_values(loaded, "kernel.gamma", &FIG3_GAMMAS);
    let series: Vec<(Vec<f64>, Vec<f64>)> = gammas
        .par_iter()
        .map(|g| {
            let mut c = cfg.clone();
            c.kernel = KernelConfig::Ou { gamma: *g, big_omega };
            c.outputs.observables = vec![Observable::MeanQ];
            let o = simulate(String::new(), c)?;
            let q = o.observables.real.get("mean_q").cloned().unwrap_or_default();
            Ok((o.observables.times, q))
        })
        .collect::<Result<_>>()?;
    let times = longest(series.iter().map(|s| &s.0));
    let names = gammas.iter().map(|g| format!("mean_q_gamma_{g}")).collect();
    let cols: Vec<Vec<f64>> = series.into_iter().map(|s| s.1).collect();
    columns_table(&times, names, &cols)
}

fn fig4(loaded: &LoadedConfig) -> Result<CsvTable> {
    let cfg = base(loaded);
    let (w1, w2) = match cfg.model {
        ModelConfig::NBoson { omega_1, omega_2 } => (omega_1, omega_2),
        ModelConfig::NFermion { ref energies } if energies.len() == 2 => (energies[0], energies[1]),
        _ => return Err(Error::config("fig4 needs an n_boson model or a two-mode n_fermion model")),
    };
    let kernel = cfg.kernel.build()?;
    let (t_final, h) = (cfg.integrator.t_final, cfg.integrator.h);
    let fermi = solve_n_fermion(&kernel, &[w1, w2], t_final, h)?;
    let bose = solve_bosonic_o(&kernel, w1, w2, t_final, h, &SolveOptions::default())?.series;

    let mut names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for i in 0..4 {
        names.push(format!("abs_X{}_fermionic", i + 1));
        // The fermionic operator has no X_3, X_4 terms.
        cols.push(if i < fermi.basis_len {
            fermi.trace(i).iter().map(|z| z.norm()).collect()
        } else {
            vec![0.0; fermi.len()]
        });
    }
    for i in 0..4 {
        names.push(format!("abs_X{}_bosonic", i + 1));
        cols.push(bose.trace(i).iter().map(|z| z.norm()).collect());
    }
    let times = if fermi.len() >= bose.len() { &fermi.times } else { &bose.times };
    columns_table(times, names, &cols)
}
