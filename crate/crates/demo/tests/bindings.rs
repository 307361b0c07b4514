use uavcc_demo::{gain_samples, pattern_samples, simulate_json};

fn pairs(v: &[f64]) -> Vec<(f64, f64)> {
    v.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn argmax(rows: &[(f64, f64)]) -> (f64, f64) {
    rows.iter().cloned().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

#[test]
fn pattern_peaks_at_the_downtilt() {
    for tilt in [0.0, 12.0] {
        let rows = pairs(&pattern_samples(1.0, tilt).unwrap());
        assert_eq!(rows.len(), 181);
        assert_eq!(rows[0].0, -90.0);
        assert_eq!(rows[180].0, 90.0);
        let peak = argmax(&rows);
        assert!((peak.0 + tilt).abs() <= 1.0, "tilt {tilt}: peak at {}", peak.0);
    }
}

#[test]
fn gain_profile_covers_the_requested_range() {
    let rows = pairs(&gain_samples(1.5, 1000.0, 10.0).unwrap());
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(rows.iter().all(|r| r.1.is_finite()));
    // A ground user far out sits near the main lobe; one right under the mast does not.
    let near = rows[0].1;
    let far = argmax(&rows).1;
    assert!(far > near + 10.0, "near {near}, best {far}");
}

#[test]
fn simulate_returns_rate_cdfs() {
    let text = simulate_json("su", 3, "r3_pc", 1, 7, 0.0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["target_bps"], 100e3);
    for group in ["uav", "gue"] {
        let g = &v[group];
        assert!(g["n"].as_u64().unwrap() > 0, "{group}");
        let r = g["reliability"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&r));
        let cdf = g["cdf"].as_array().unwrap();
        let probs: Vec<f64> = cdf.iter().map(|p| p[1].as_f64().unwrap()).collect();
        assert!(probs.windows(2).all(|w| w[1] >= w[0]));
        // Midpoint convention: the last step sits half a sample below one.
        let n = probs.len() as f64;
        assert!((probs.last().unwrap() - (1.0 - 0.5 / n)).abs() < 1e-12);
    }
    assert_eq!(text, simulate_json("su", 3, "r3_pc", 1, 7, 0.0).unwrap());
}

#[test]
fn simulate_runs_the_multi_user_network() {
    let v: serde_json::Value = serde_json::from_str(&simulate_json("mu", 5, "perfect", 1, 2, 150.0).unwrap()).unwrap();
    assert!(v["uav"]["n"].as_u64().unwrap() > 0);
}

#[test]
fn bad_inputs_are_reported() {
    assert!(pattern_samples(0.0, 12.0).unwrap_err().contains("step"));
    assert!(gain_samples(1.5, -1.0, 5.0).is_err());
    assert!(simulate_json("xx", 3, "r3_pc", 1, 1, 0.0).is_err());
    assert!(simulate_json("su", 7, "r3_pc", 1, 1, 0.0).is_err());
}
