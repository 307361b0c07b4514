//! WebAssembly bindings for the browser demo in `www/`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use uavcc::antenna::{gain_vs_distance, su_combining_gain, ArrayGeometry, ElementPattern};
use uavcc::config::{CsiConfig, ScenarioConfig};
use uavcc::deployment::Case;
use uavcc::metrics::{cdf, reliability, RATE_SERIES};
use uavcc::{run_scenario_with, Execution, Mode};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn vertical_pattern(step_deg: f64, downtilt_deg: f64) -> Result<Vec<f64>, JsValue> {
    js(pattern_samples(step_deg, downtilt_deg))
}

#[wasm_bindgen]
pub fn gain_profile(user_height_m: f64, max_distance_m: f64, step_m: f64) -> Result<Vec<f64>, JsValue> {
    js(gain_samples(user_height_m, max_distance_m, step_m))
}

#[wasm_bindgen]
pub fn simulate(mode: &str, case: u8, csi: &str, drops: u32, seed: u32, uav_height_m: f64) -> Result<String, JsValue> {
    js(simulate_json(mode, case, csi, drops, seed, uav_height_m))
}

/// Vertical pattern of the single-user column at boresight azimuth, as
/// interleaved `[elevation_deg, gain_dbi, ...]`.
pub fn pattern_samples(step_deg: f64, downtilt_deg: f64) -> Result<Vec<f64>, String> {
    if !(step_deg > 0.0 && step_deg <= 90.0) {
        return Err(err("step must lie in (0, 90]"));
    }
    let geom = ArrayGeometry { downtilt_deg, ..ArrayGeometry::single_user() };
    let pattern = ElementPattern::default();
    let n = (180.0 / step_deg).round() as usize;
    let mut out = Vec::with_capacity(2 * (n + 1));
    for i in 0..=n {
        let el = -90.0 + i as f64 * step_deg;
        out.push(el);
        out.push(su_combining_gain(&geom, &pattern, 0.0, el).map_err(err)?);
    }
    Ok(out)
}

/// Combining gain toward a user on the sector axis versus ground distance,
/// as interleaved `[d2_m, gain_dbi, ...]`.
pub fn gain_samples(user_height_m: f64, max_distance_m: f64, step_m: f64) -> Result<Vec<f64>, String> {
    if !(step_m > 0.0 && max_distance_m > 0.0) {
        return Err(err("distances must be positive"));
    }
    let geom = ArrayGeometry::single_user();
    let pattern = ElementPattern::default();
    let mut out = Vec::new();
    let mut d = step_m;
    while d <= max_distance_m {
        out.push(d);
        out.push(gain_vs_distance(&geom, &pattern, 25.0, user_height_m, d).map_err(err)?);
        d += step_m;
    }
    Ok(out)
}

/// Runs a small scenario on a one-tier layout and returns JSON with the rate
/// CDFs of UAVs and ground users and their reliability at 100 kbps.
/// `uav_height_m <= 0` spreads UAVs over the full height range.
pub fn simulate_json(
    mode: &str,
    case: u8,
    csi: &str,
    drops: u32,
    seed: u32,
    uav_height_m: f64,
) -> Result<String, String> {
    let mut cfg = ScenarioConfig {
        mode: mode.parse::<Mode>().map_err(err)?,
        drops: drops.clamp(1, 50) as usize,
        seed: seed as u64,
        ..Default::default()
    };
    cfg.deployment.tiers = 1;
    cfg.deployment.case = case.to_string().parse::<Case>().map_err(err)?;
    cfg.deployment.uav_fixed_height_m = (uav_height_m > 0.0).then_some(uav_height_m);
    cfg.mu.csi_mode = csi.parse::<CsiConfig>().map_err(err)?;
    let report = run_scenario_with(&cfg, Execution::Serial).map_err(err)?;
    let target = cfg.metrics.target_rate_bps;
    let group = |uav: bool| -> serde_json::Value {
        let v = report.metrics.values(RATE_SERIES, |s| s.kind.is_uav() == uav);
        match cdf(&v) {
            Ok(c) => json!({
                "n": v.len(),
                "reliability": reliability(&v, target),
                "cdf": c.points.iter().map(|&(x, f)| [x, f]).collect::<Vec<_>>(),
            }),
            Err(_) => json!({ "n": 0, "reliability": null, "cdf": [] }),
        }
    };
    Ok(json!({ "target_bps": target, "uav": group(true), "gue": group(false) }).to_string())
}
