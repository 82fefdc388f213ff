//! Browser bindings: coefficients, a dependence curve and a simulated path.

use levyarma::coeffs::{coefficients, ModelSpec};
use levyarma::dependence::{dependence, DependenceOptions};
use levyarma::innovations::InnovationSpec;
use levyarma::simulate::{simulate_paths, SimOptions};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T, String> {
    serde_json::from_str(s).map_err(|e| format!("{what}: {e}"))
}

/// `{"c": [c_0, …, c_n]}`.
pub fn coeffs_json(model: &str, n: usize) -> Result<String, String> {
    let m: ModelSpec = parse("model", model)?;
    let st = coefficients(&m, n).map_err(|e| e.to_string())?;
    Ok(json!({ "c": st.values }).to_string())
}

/// `[{"n", "re", "im", "err"}, …]` for lags 0..=max_lag.
pub fn depend_json(model: &str, innov: &str, max_lag: usize, z1: f64, z2: f64) -> Result<String, String> {
    let m: ModelSpec = parse("model", model)?;
    let s: InnovationSpec = parse("innovation", innov)?;
    let o = DependenceOptions::default();
    let rows = (0..=max_lag).map(|n| dependence(&m, &s, n, z1, z2, &o)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// `{"x": [...]}`, one stable-driven path.
pub fn simulate_json(model: &str, innov: &str, len: usize, seed: u64) -> Result<String, String> {
    let m: ModelSpec = parse("model", model)?;
    let s = match parse::<InnovationSpec>("innovation", innov)? {
        InnovationSpec::Stable(s) => s,
        InnovationSpec::Id(_) => return Err("simulation needs a stable innovation".into()),
    };
    let b = simulate_paths(&m, &s, 1, len, seed, &SimOptions { tail_tol: 1e-4, ..Default::default() }).map_err(|e| e.to_string())?;
    Ok(json!({ "x": b.path(0) }).to_string())
}

#[wasm_bindgen]
pub fn coeffs(model: &str, n: usize) -> Result<String, JsValue> {
    coeffs_json(model, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn depend(model: &str, innov: &str, max_lag: usize, z1: f64, z2: f64) -> Result<String, JsValue> {
    depend_json(model, innov, max_lag, z1, z2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(model: &str, innov: &str, len: usize, seed: u32) -> Result<String, JsValue> {
    simulate_json(model, innov, len, seed as u64).map_err(|e| JsValue::from_str(&e))
}
