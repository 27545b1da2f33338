//! WebAssembly bindings for the static demo page in `www/`. Each exported
//! function takes plain numbers and complex literals (`a+bi`) and returns a
//! JSON string; the logic lives in [`demo`] so it is testable natively.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_json<T: serde::Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Spectra of `H(ξ)`, `H(0)`, `t_ξ(u)` and `t_0(u)` with matching distances.
#[wasm_bindgen(js_name = compareSpectra)]
pub fn compare_spectra(n_sites: u32, xi: &str, u: &str) -> Result<String, JsError> {
    to_json(demo::compare_spectra(n_sites as usize, xi, u))
}

/// One- and two-magnon Bethe states from the standard seeds, with `Λ(u)`
/// placed against the exact spectrum of `t_ξ(u)`.
#[wasm_bindgen(js_name = betheStates)]
pub fn bethe_states(n_sites: u32, xi: &str, u: &str) -> Result<String, JsError> {
    to_json(demo::bethe_states(n_sites as usize, xi, u))
}

/// Identifiers and formulas accepted by [`identity_residual`].
#[wasm_bindgen(js_name = identityNames)]
pub fn identity_names() -> Result<String, JsError> {
    to_json(Ok(demo::identity_catalog()))
}

#[wasm_bindgen(js_name = identityResidual)]
pub fn identity_residual(name: &str, n_sites: u32, xi: &str, u: &str, v: &str) -> Result<String, JsError> {
    to_json(demo::identity_residual(name, n_sites as usize, xi, u, v))
}
