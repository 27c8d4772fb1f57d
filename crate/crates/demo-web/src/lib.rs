//! WebAssembly bindings for the static demo page in `www/`. Every function
//! returns a JSON string; errors surface as JavaScript exceptions.

use robust_matching::embedding::{bourgain_embed, maximize_euclidean_robustness, measure_distortion};
use robust_matching::metric::random_connected_space;
use robust_matching::perturbation::{
    critical_market, critical_ratio, is_c_robust, preservation_probability, spike_value, theorem_ub_level,
    AppendixSampler,
};
use robust_matching::rng::trial_rng;
use robust_matching::ProfileSet;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest inputs the page accepts, to keep the tab responsive.
const MAX_RESTARTS: usize = 2_000;
const MAX_ITERS: usize = 2_000;
const MAX_VERTICES: usize = 128;
const MAX_TRIALS: u64 = 200_000;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data")
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn bounded<T: PartialOrd + std::fmt::Display>(name: &str, value: T, max: T) -> Result<T, JsError> {
    if value > max {
        Err(JsError::new(&format!("{name} = {value} exceeds the demo limit {max}")))
    } else {
        Ok(value)
    }
}

/// Multistart search for the most robust Euclidean placement of the
/// Condorcet cycle in `dim` dimensions.
#[wasm_bindgen]
pub fn banach_search(dim: usize, restarts: usize, iters: usize, seed: u64) -> Result<String, JsError> {
    let search = maximize_euclidean_robustness(
        dim,
        bounded("restarts", restarts, MAX_RESTARTS)?,
        bounded("iters", iters, MAX_ITERS)?,
        seed,
    )
    .map_err(js_err)?;
    Ok(to_json(&search))
}

#[derive(Serialize)]
struct DistortionSummary {
    vertices: usize,
    edges: usize,
    dim: usize,
    max_expansion: f64,
    ln_size: f64,
    expansion_over_ln_size: f64,
    /// Edges of the sampled graph, for drawing.
    graph: Vec<(usize, usize, f64)>,
    /// First two embedding coordinates of each vertex.
    projection: Vec<(f64, f64)>,
}

/// Samples a random connected weighted graph and reports the distortion of
/// its Bourgain embedding.
#[wasm_bindgen]
pub fn bourgain_distortion(vertices: usize, density: f64, quality: usize, seed: u64) -> Result<String, JsError> {
    let v = bounded("vertices", vertices, MAX_VERTICES)?;
    if v < 2 {
        return Err(JsError::new("need at least 2 vertices"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(JsError::new("density must lie in [0, 1]"));
    }
    let mut rng = trial_rng(seed, 0);
    let space = random_connected_space(v, density, 1.0, 10.0, &mut rng);
    let t = bourgain_embed(&space, quality, seed).map_err(js_err)?;
    let report = measure_distortion(&space, &t).map_err(js_err)?;
    let ln_size = (v as f64).ln();
    Ok(to_json(&DistortionSummary {
        vertices: v,
        edges: space.edges().len(),
        dim: t.dim,
        max_expansion: report.max_expansion,
        ln_size,
        expansion_over_ln_size: report.max_expansion / ln_size,
        graph: space.edges().iter().map(|e| (e.0, e.1, e.2)).collect(),
        projection: t
            .points
            .iter()
            .map(|p| (p[0], p.get(1).copied().unwrap_or(0.0)))
            .collect(),
    }))
}

#[derive(Serialize)]
struct AppendixSummary {
    n: usize,
    c: f64,
    eps: f64,
    trials: u64,
    seed: u64,
    critical_ratio: f64,
    theorem_ub_level: f64,
    deterministic_robust_below_ub: bool,
    spike: f64,
    preserved: u64,
    preserved_fraction: f64,
}

/// Builds the critical market and estimates how often the stable pair
/// survives the spike perturbation with mean (1+ε)C.
#[wasm_bindgen]
pub fn appendix_monte_carlo(n: usize, c: f64, eps: f64, trials: u64, seed: u64) -> Result<String, JsError> {
    let trials = bounded("trials", trials, MAX_TRIALS)?;
    let market = critical_market(n, c, eps).map_err(js_err)?;
    let ub = theorem_ub_level(n, c);
    let below = is_c_robust(&market, (ub - 1e-9).max(1.0), &ProfileSet::Exhaustive).map_err(js_err)?;
    let sampler = AppendixSampler::new(&market, c, eps).map_err(js_err)?;
    let estimate = preservation_probability(&market, &sampler, trials, seed).map_err(js_err)?;
    Ok(to_json(&AppendixSummary {
        n,
        c,
        eps,
        trials,
        seed,
        critical_ratio: critical_ratio(n, c, eps),
        theorem_ub_level: ub,
        deterministic_robust_below_ub: below,
        spike: spike_value(n, c, eps),
        preserved: estimate.preserved,
        preserved_fraction: estimate.fraction,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_kills_every_trial() {
        let v: serde_json::Value = serde_json::from_str(&appendix_monte_carlo(3, 1.5, 0.2, 500, 1).unwrap()).unwrap();
        assert_eq!(v["preserved"], 0);
        assert_eq!(v["theorem_ub_level"], 7.0);
        assert_eq!(v["deterministic_robust_below_ub"], true);
    }

    #[test]
    fn distortion_summary_shapes() {
        let v: serde_json::Value = serde_json::from_str(&bourgain_distortion(16, 0.2, 2, 3).unwrap()).unwrap();
        assert_eq!(v["projection"].as_array().unwrap().len(), 16);
        assert!(v["max_expansion"].as_f64().unwrap() >= 1.0);
    }

    #[test]
    fn banach_value_below_three() {
        let v: serde_json::Value = serde_json::from_str(&banach_search(2, 10, 40, 4).unwrap()).unwrap();
        assert!(v["best_value"].as_f64().unwrap() <= 3.0);
    }
}
