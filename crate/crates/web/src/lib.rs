//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes a JSON settings object and returns JSON, so the page
//! needs nothing beyond `JSON.parse`. The plain-Rust functions in [`api`]
//! do the work and are what the native tests exercise.

use wasm_bindgen::prelude::*;

pub mod api;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `{"x": [...], "f": [...]}` for the noise-free objective on the settings' bounds.
#[wasm_bindgen(js_name = objectiveCurve)]
pub fn objective_curve(settings: &str, n: usize) -> Result<String, JsError> {
    js(api::objective_curve(settings, n))
}

/// GP posterior, acquisition surface, and first proposal after the initial samples.
#[wasm_bindgen(js_name = firstIteration)]
pub fn first_iteration(settings: &str) -> Result<String, JsError> {
    js(api::first_iteration(settings))
}

/// Full optimization run, serialized as a run report.
#[wasm_bindgen(js_name = runOptimization)]
pub fn run_optimization(settings: &str) -> Result<String, JsError> {
    js(api::run_optimization(settings))
}
