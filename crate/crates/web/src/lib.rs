//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every exported function takes and returns JSON strings; the plain-Rust
//! versions in [`demo`] do the work and are what the tests exercise.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js_err(e: demo::DemoError) -> JsError {
    JsError::new(&e.to_string())
}

/// Samples a uniform member of `A_{n,d}` and describes it.
#[wasm_bindgen(js_name = sampleMatrix)]
pub fn sample_matrix(n: usize, d: usize, seed: u64) -> Result<String, JsError> {
    demo::sample(n, d, seed).and_then(|v| demo::to_json(&v)).map_err(js_err)
}

/// Applies one uniformly chosen feasible switching to `matrix` (text format).
#[wasm_bindgen(js_name = switchOnce)]
pub fn switch_once(matrix: &str, seed: u64) -> Result<String, JsError> {
    demo::switch_once(matrix, seed).and_then(|v| demo::to_json(&v)).map_err(js_err)
}

#[wasm_bindgen(js_name = corankHistogram)]
pub fn corank_histogram(n: usize, d: usize, trials: u32, seed: u64) -> Result<String, JsError> {
    demo::corank_histogram(n, d, trials, seed).and_then(|v| demo::to_json(&v)).map_err(js_err)
}
