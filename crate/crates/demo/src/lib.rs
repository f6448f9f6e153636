//! Browser bindings for three fqsd calculations.
//!
//! Each exported function takes plain numbers and returns a JSON string of
//! equal-length series keyed by name. The native `*_json` functions do the
//! work and are what the tests call; the `#[wasm_bindgen]` wrappers only turn
//! errors into JS exceptions.

use fqsd::config::{LoadedConfig, Overrides};
use fqsd::figdata::{compute, Figure};
use fqsd::io::CsvTable;
use fqsd::run::simulate;
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

fn load(toml: &str) -> Result<LoadedConfig, String> {
    LoadedConfig::from_str(toml, Overrides::default()).map_err(|e| e.to_string())
}

fn table_json(table: &CsvTable) -> Value {
    let mut out = Map::new();
    for name in &table.header {
        out.insert(name.clone(), json!(table.column(name).unwrap_or_default()));
    }
    Value::Object(out)
}

/// `|rho_21(t)|` and the excited population of a qubit in `|+>` coupled to one bath mode.
pub fn coherence_json(g: f64, omega_b: f64, omega: f64, t_final: f64, h: f64) -> Result<String, String> {
    let loaded = load(&format!(
        "[model]\nmodel = \"one_qubit\"\nomega = {omega:?}\n\
         [kernel]\ntype = \"single_mode\"\ng = {g:?}\nomega_b = {omega_b:?}\n\
         [integrator]\nT = {t_final:?}\nh = {h:?}\ncoeff_source = \"grid\"\n\
         [outputs]\nobservables = [\"coherence\", \"populations\"]\n"
    ))?;
    let o = simulate(String::new(), loaded.config).map_err(|e| e.to_string())?;
    let rho21 = o.observables.complex.get("rho21").cloned().unwrap_or_default();
    let excited = o.observables.real.get("pop_0").cloned().unwrap_or_default();
    Ok(json!({
        "t": o.observables.times,
        "abs_rho21": rho21.iter().map(|z| z.norm()).collect::<Vec<_>>(),
        "rho_ee": excited,
        "truncated_at": o.invariants.truncated_at,
    })
    .to_string())
}

/// Bell-state concurrence of two qubits in a common Ohmic bath, one series per cutoff.
pub fn concurrence_json(strength: f64, cutoffs: &[f64], t_final: f64, h: f64) -> Result<String, String> {
    if cutoffs.is_empty() {
        return Err("at least one cutoff is needed".into());
    }
    let values: Vec<String> = cutoffs.iter().map(|w| format!("{w:?}")).collect();
    let loaded = load(&format!(
        "[model]\nmodel = \"two_qubit\"\nomega_a = 1.0\nomega_b = 1.0\n\
         [kernel]\ntype = \"ohmic\"\nstrength = {strength:?}\ncutoff = 1.0\n\
         [integrator]\nT = {t_final:?}\nh = {h:?}\n\
         [initial_state]\nkind = \"bell\"\n\
         [sweep]\nparameter = \"kernel.cutoff\"\nvalues = [{}]\n",
        values.join(", ")
    ))?;
    let data = compute(Figure::Fig1, &loaded).map_err(|e| e.to_string())?;
    Ok(table_json(&data.table).to_string())
}

/// `|X_1..X_4|` for a fermion pair with energies `w1`, `w2` in an OU bath,
/// fermionic next to bosonic.
pub fn coefficients_json(w1: f64, w2: f64, gamma: f64, big_omega: f64, t_final: f64, h: f64) -> Result<String, String> {
    let loaded = load(&format!(
        "[model]\nmodel = \"n_boson\"\nomega_1 = {w1:?}\nomega_2 = {w2:?}\n\
         [kernel]\ntype = \"ou\"\ngamma = {gamma:?}\nbig_omega = {big_omega:?}\n\
         [integrator]\nT = {t_final:?}\nh = {h:?}\n"
    ))?;
    let data = compute(Figure::Fig4, &loaded).map_err(|e| e.to_string())?;
    Ok(table_json(&data.table).to_string())
}

#[wasm_bindgen]
pub fn coherence(g: f64, omega_b: f64, omega: f64, t_final: f64, h: f64) -> Result<String, JsError> {
    coherence_json(g, omega_b, omega, t_final, h).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn concurrence(strength: f64, cutoffs: Vec<f64>, t_final: f64, h: f64) -> Result<String, JsError> {
    concurrence_json(strength, &cutoffs, t_final, h).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn coefficients(w1: f64, w2: f64, gamma: f64, big_omega: f64, t_final: f64, h: f64) -> Result<String, JsError> {
    coefficients_json(w1, w2, gamma, big_omega, t_final, h).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    fn series(v: &Value, key: &str) -> Vec<f64> {
        v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    }

    #[test]
    fn coherence_starts_at_one_half() {
        let v = parse(&coherence_json(0.8, 1.5, 1.0, 2.0, 0.01).unwrap());
        let c = series(&v, "abs_rho21");
        assert_eq!(c.len(), series(&v, "t").len());
        assert!((c[0] - 0.5).abs() < 1e-12);
        assert!(c.iter().all(|x| *x <= 0.5 + 1e-9));
        assert!(v["truncated_at"].is_null());
    }

    #[test]
    fn concurrence_has_one_column_per_cutoff() {
        let v = parse(&concurrence_json(0.2, &[0.5, 2.0], 1.0, 0.01).unwrap());
        let cols = v.as_object().unwrap();
        assert_eq!(cols.len(), 3);
        assert!((series(&v, "concurrence_wc_0.5")[0] - 1.0).abs() < 1e-12);
        assert!(concurrence_json(0.2, &[], 1.0, 0.01).is_err());
    }

    #[test]
    fn fermionic_pair_has_no_x3() {
        let v = parse(&coefficients_json(2.0, 1.0, 0.4, std::f64::consts::FRAC_PI_4, 1.0, 0.02).unwrap());
        assert!(series(&v, "abs_X3_fermionic").iter().all(|x| *x == 0.0));
        assert!(series(&v, "abs_X3_bosonic").iter().any(|x| *x > 0.0));
    }

    #[test]
    fn bad_parameters_are_reported() {
        let e = coherence_json(0.8, 1.5, 1.0, 1.0, 0.5).unwrap_err();
        assert!(e.contains("T/10"), "{e}");
    }
}
