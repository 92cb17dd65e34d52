//! Browser entry points. Each export wraps a plain function that the native
//! tests call directly.

use wasm_bindgen::prelude::*;
use wz_core::builder::CodeParams;
use wz_core::codec;
use wz_core::experiment::{run_experiment, ExperimentConfig};
use wz_core::verify;

/// Largest trial count the page may request.
pub const MAX_TRIALS: usize = 50;

/// Block lengths offered by the page, each with its `(m, k1, k2)`.
const DEMO_CODES: [(usize, usize, usize, usize); 3] = [(200, 190, 40, 120), (400, 380, 80, 240), (1000, 950, 200, 600)];

fn bound_samples(p: f64, samples: usize) -> Result<Vec<f64>, String> {
    let samples = samples.clamp(2, 2000);
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let d = p * (i as f64 / (samples - 1) as f64);
        out.push(d);
        out.push(codec::wz_rate(p, d).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn example_report() -> String {
    serde_json::to_string(&verify::verify_example()).expect("checks serialize")
}

fn simulate_json(p: f64, n: usize, trials: usize, seed: u64) -> Result<String, String> {
    let &(n, m, k1, k2) = DEMO_CODES
        .iter()
        .find(|c| c.0 == n)
        .ok_or_else(|| format!("block length {n} not offered"))?;
    if !(1..=MAX_TRIALS).contains(&trials) {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let config = ExperimentConfig {
        name: format!("browser-n{n}"),
        dist_id: "reg-7-8".into(),
        code: Some(CodeParams {
            n,
            m,
            k1,
            k2,
            zeta: 3,
            poisson_lambda: 12.0,
            i_max: 30,
        }),
        p,
        trials,
        master_seed: seed,
        bip: Default::default(),
        sp: Default::default(),
        exhaustive: false,
    };
    let (code, _) = config.build_code().map_err(|e| e.to_string())?;
    let result = run_experiment(&config, &code, 1, None).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&result).expect("result serializes"))
}

/// Flat `[D0, R0, D1, R1, ...]` samples of the bound from `D = 0` to `D = p`.
#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve(p: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    bound_samples(p, samples).map_err(|e| JsError::new(&e))
}

/// `[D, R]` where the time-sharing chord meets the curve.
#[wasm_bindgen]
pub fn boundary(p: f64) -> Result<Vec<f64>, JsError> {
    let (d, r) = codec::wz_boundary(p).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(vec![d, r])
}

/// JSON array of `{name, holds, detail}` for the ten-bit example.
#[wasm_bindgen(js_name = verifyExample)]
pub fn verify_example() -> String {
    example_report()
}

/// Builds a small regular compound code and runs `trials` encode/decode
/// trials at crossover `p`; returns the experiment result as JSON.
#[wasm_bindgen]
pub fn simulate(p: f64, n: usize, trials: usize, seed: u32) -> Result<String, JsError> {
    simulate_json(p, n, trials, u64::from(seed)).map_err(|e| JsError::new(&e))
}
