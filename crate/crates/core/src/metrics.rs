//! Sample collection, empirical CDFs, height profiles and reliability.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::association::AssociationRecord;
use crate::deployment::UserKind;
use crate::error::{Error, Result};

pub const RATE_SERIES: &str = "rate_bps";
pub const SINR_SERIES: &str = "sinr_db";
pub const COUPLING_SERIES: &str = "coupling_loss_db";

/// C&C downlink target rate.
pub const TARGET_RATE_BPS: f64 = 100e3;

pub const DEFAULT_HEIGHT_GRID: [f64; 9] = [1.5, 15.0, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0, 300.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub height_grid_m: Vec<f64>,
    pub min_samples_per_bin: usize,
    pub target_rate_bps: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            height_grid_m: DEFAULT_HEIGHT_GRID.to_vec(),
            min_samples_per_bin: 100,
            target_rate_bps: TARGET_RATE_BPS,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.height_grid_m.is_empty() || self.height_grid_m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("metrics: height grid must be non-empty and increasing".into()));
        }
        if !(self.target_rate_bps > 0.0) {
            return Err(Error::Config("metrics: target_rate_bps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub kind: UserKind,
    pub height_m: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalEvent {
    pub drop: usize,
    pub prb: usize,
    pub cell: usize,
    pub dropped_user: usize,
    pub condition_number: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub series: BTreeMap<String, Vec<Sample>>,
    pub association: Vec<AssociationRecord>,
    pub events: Vec<NumericalEvent>,
}

impl MetricsReport {
    pub fn push(&mut self, series: &str, sample: Sample) {
        self.series.entry(series.to_string()).or_default().push(sample);
    }

    /// Appends `other` after `self`; merging in drop order keeps reports deterministic.
    pub fn merge(&mut self, other: MetricsReport) {
        for (k, v) in other.series {
            self.series.entry(k).or_default().extend(v);
        }
        self.association.extend(other.association);
        self.events.extend(other.events);
    }

    pub fn values<'a>(&'a self, series: &str, filter: impl Fn(&Sample) -> bool + 'a) -> Vec<f64> {
        self.series.get(series).map(|s| s.iter().filter(|x| filter(x)).map(|x| x.value).collect()).unwrap_or_default()
    }

    pub fn uav_values(&self, series: &str) -> Vec<f64> {
        self.values(series, |s| s.kind.is_uav())
    }

    pub fn gue_values(&self, series: &str) -> Vec<f64> {
        self.values(series, |s| !s.kind.is_uav())
    }
}

/// Empirical CDF with the midpoint convention `F(x_(i)) = (i - 1/2) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub points: Vec<(f64, f64)>,
}

impl EmpiricalCdf {
    /// Linear interpolation between CDF points, clamped at the extremes.
    pub fn percentile(&self, p: f64) -> f64 {
        let pts = &self.points;
        if p <= pts[0].1 {
            return pts[0].0;
        }
        if p >= pts[pts.len() - 1].1 {
            return pts[pts.len() - 1].0;
        }
        let i = pts.partition_point(|&(_, f)| f <= p);
        let (x0, f0) = pts[i - 1];
        let (x1, f1) = pts[i];
        x0 + (x1 - x0) * (p - f0) / (f1 - f0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn cdf(series: &[f64]) -> Result<EmpiricalCdf> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut v = series.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    Ok(EmpiricalCdf { points: v.into_iter().enumerate().map(|(i, x)| (x, (i as f64 + 0.5) / n)).collect() })
}

pub fn percentile(series: &[f64], p: f64) -> Result<f64> {
    Ok(cdf(series)?.percentile(p))
}

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

/// Fraction of samples at or above `target`.
pub fn reliability(series: &[f64], target: f64) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    series.iter().filter(|&&v| v >= target).count() as f64 / series.len() as f64
}

/// Number of runs of at least `min_run` empty bins of width `bin` lying
/// between occupied bins of the histogram of non-negative `values`.
pub fn histogram_gaps(values: &[f64], bin: f64, min_run: usize) -> usize {
    let Some(max) = values.iter().cloned().reduce(f64::max) else { return 0 };
    let mut hist = vec![0usize; (max / bin) as usize + 1];
    for v in values {
        hist[(v / bin) as usize] += 1;
    }
    let first = hist.iter().position(|&n| n > 0).unwrap_or(0);
    let mut gaps = 0;
    let mut run = 0;
    for &n in &hist[first..] {
        if n == 0 {
            run += 1;
        } else {
            if run >= min_run {
                gaps += 1;
            }
            run = 0;
        }
    }
    gaps
}

/// Index of the grid point nearest to `h`.
pub fn height_bin(grid: &[f64], h: f64) -> usize {
    grid.iter().enumerate().min_by(|a, b| (a.1 - h).abs().total_cmp(&(b.1 - h).abs())).map(|(i, _)| i).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightRow {
    pub height_m: f64,
    pub n: usize,
    pub p05: f64,
    pub mean: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeightProfile {
    pub rows: Vec<HeightRow>,
    pub warnings: Vec<String>,
}

/// 5th percentile, mean and 95th percentile per height bin.
pub fn height_profile(samples: &[(f64, f64)], grid: &[f64], min_samples: usize) -> HeightProfile {
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); grid.len()];
    for &(h, v) in samples {
        bins[height_bin(grid, h)].push(v);
    }
    let mut out = HeightProfile::default();
    for (i, values) in bins.into_iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        if values.len() < min_samples {
            out.warnings.push(format!(
                "height bin {} m has {} samples (< {min_samples}); omitted",
                grid[i],
                values.len()
            ));
            continue;
        }
        let c = cdf(&values).expect("non-empty");
        out.rows.push(HeightRow {
            height_m: grid[i],
            n: values.len(),
            p05: c.percentile(0.05),
            mean: mean(&values),
            p95: c.percentile(0.95),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

impl GroupSummary {
    fn of(values: &[f64]) -> Option<Self> {
        let c = cdf(values).ok()?;
        Some(GroupSummary {
            n: values.len(),
            mean: mean(values),
            p05: c.percentile(0.05),
            p50: c.percentile(0.5),
            p95: c.percentile(0.95),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub target_rate_bps: f64,
    /// Fraction of users reaching the target rate, per group ("uav", "gue").
    pub reliability: BTreeMap<String, f64>,
    /// UAV reliability per height bin (bin center in meters as key).
    pub uav_reliability_by_height: BTreeMap<String, f64>,
    pub rate_bps: BTreeMap<String, GroupSummary>,
    pub sinr_db: BTreeMap<String, GroupSummary>,
    pub coupling_loss_db: BTreeMap<String, GroupSummary>,
    pub numerical_events: usize,
    pub warnings: Vec<String>,
}

fn group_values(report: &MetricsReport, series: &str) -> Vec<(&'static str, Vec<f64>)> {
    vec![("uav", report.uav_values(series)), ("gue", report.gue_values(series))]
}

pub fn summarize(report: &MetricsReport, cfg: &MetricsConfig) -> Summary {
    let mut s = Summary {
        target_rate_bps: cfg.target_rate_bps,
        reliability: BTreeMap::new(),
        uav_reliability_by_height: BTreeMap::new(),
        rate_bps: BTreeMap::new(),
        sinr_db: BTreeMap::new(),
        coupling_loss_db: BTreeMap::new(),
        numerical_events: report.events.len(),
        warnings: Vec::new(),
    };
    for (g, v) in group_values(report, RATE_SERIES) {
        if !v.is_empty() {
            s.reliability.insert(g.into(), reliability(&v, cfg.target_rate_bps));
        }
        if let Some(x) = GroupSummary::of(&v) {
            s.rate_bps.insert(g.into(), x);
        }
    }
    for (name, target) in [(SINR_SERIES, &mut s.sinr_db), (COUPLING_SERIES, &mut s.coupling_loss_db)] {
        for (g, v) in group_values(report, name) {
            if let Some(x) = GroupSummary::of(&v) {
                target.insert(g.into(), x);
            }
        }
    }
    if let Some(rates) = report.series.get(RATE_SERIES) {
        let mut bins: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for x in rates.iter().filter(|x| x.kind.is_uav()) {
            bins.entry(height_bin(&cfg.height_grid_m, x.height_m)).or_default().push(x.value);
        }
        for (i, v) in bins {
            s.uav_reliability_by_height
                .insert(format!("{}", cfg.height_grid_m[i]), reliability(&v, cfg.target_rate_bps));
        }
    }
    s
}

fn profile_csv(report: &MetricsReport, series: &str, cfg: &MetricsConfig, warnings: &mut Vec<String>) -> String {
    let mut out = String::from("kind,height_m,n,p05,mean,p95\n");
    for (g, uav) in [("uav", true), ("gue", false)] {
        let samples: Vec<(f64, f64)> = report
            .series
            .get(series)
            .map(|s| s.iter().filter(|x| x.kind.is_uav() == uav).map(|x| (x.height_m, x.value)).collect())
            .unwrap_or_default();
        let prof = height_profile(&samples, &cfg.height_grid_m, cfg.min_samples_per_bin);
        warnings.extend(prof.warnings.into_iter().map(|w| format!("{series}/{g}: {w}")));
        for r in prof.rows {
            let _ = writeln!(out, "{g},{},{},{},{},{}", r.height_m, r.n, r.p05, r.mean, r.p95);
        }
    }
    out
}

fn rate_cdf_csv(report: &MetricsReport, cfg: &MetricsConfig) -> String {
    let mut out = String::from("kind,height_bin_m,rate_bps,cumulative_probability\n");
    let Some(rates) = report.series.get(RATE_SERIES) else {
        return out;
    };
    for (g, uav) in [("uav", true), ("gue", false)] {
        let all: Vec<&Sample> = rates.iter().filter(|x| x.kind.is_uav() == uav).collect();
        if let Ok(c) = cdf(&all.iter().map(|x| x.value).collect::<Vec<_>>()) {
            for (x, f) in c.points {
                let _ = writeln!(out, "{g},,{x},{f}");
            }
        }
        if uav {
            let mut bins: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for x in &all {
                bins.entry(height_bin(&cfg.height_grid_m, x.height_m)).or_default().push(x.value);
            }
            for (i, v) in bins {
                if let Ok(c) = cdf(&v) {
                    for (x, f) in c.points {
                        let _ = writeln!(out, "{g},{},{x},{f}", cfg.height_grid_m[i]);
                    }
                }
            }
        }
    }
    out
}

fn association_csv(report: &MetricsReport) -> String {
    let mut out = String::from("user_id,kind,height,serving_cell,d2,d3,gain_dbi\n");
    for r in &report.association {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.user_id,
            r.kind.as_str(),
            r.height_m,
            r.serving_cell,
            r.d2,
            r.d3,
            r.gain_dbi
        );
    }
    out
}

/// Writes the four metric CSVs and `summary.json` (with `extra` merged into
/// the JSON object) to `dir`.
pub fn write_outputs(
    report: &MetricsReport,
    cfg: &MetricsConfig,
    extra: serde_json::Value,
    dir: &Path,
) -> Result<Summary> {
    std::fs::create_dir_all(dir)?;
    let mut summary = summarize(report, cfg);
    let mut warnings = Vec::new();
    std::fs::write(dir.join("rate_cdf.csv"), rate_cdf_csv(report, cfg))?;
    std::fs::write(dir.join("sinr_height.csv"), profile_csv(report, SINR_SERIES, cfg, &mut warnings))?;
    std::fs::write(dir.join("coupling_height.csv"), profile_csv(report, COUPLING_SERIES, cfg, &mut warnings))?;
    std::fs::write(dir.join("association.csv"), association_csv(report))?;
    summary.warnings = warnings;
    let mut json = serde_json::to_value(&summary)?;
    if let (Some(obj), serde_json::Value::Object(extra)) = (json.as_object_mut(), extra) {
        obj.extend(extra);
    }
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&json)?)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn median_of_three() {
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
    }

    #[test]
    fn constant_series_is_a_unit_step() {
        let c = cdf(&[4.0; 10]).unwrap();
        for p in [0.0, 0.01, 0.5, 0.99, 1.0] {
            assert_eq!(c.percentile(p), 4.0);
        }
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(matches!(cdf(&[]), Err(Error::EmptySeries)));
    }

    #[test]
    fn uniform_ninetieth_percentile() {
        // Sampling std of the 0.9 quantile at n = 1e4 is sqrt(0.09 / 1e4) = 0.003.
        let mut rng = seeded(11);
        let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let p = percentile(&v, 0.9).unwrap();
        assert!((p - 0.9).abs() < 0.01, "{p}");
    }

    #[test]
    fn gaussian_profile_quantiles() {
        let mut rng = seeded(12);
        let sigma = 3.0;
        let samples: Vec<(f64, f64)> = (0..10_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (50.0, 10.0 + sigma * z)
            })
            .collect();
        let prof = height_profile(&samples, &DEFAULT_HEIGHT_GRID, 100);
        assert_eq!(prof.rows.len(), 1);
        let r = &prof.rows[0];
        let z = 1.644_853_626_951_472_2;
        assert!((r.p05 - (10.0 - z * sigma)).abs() < 0.1 * sigma);
        assert!((r.p95 - (10.0 + z * sigma)).abs() < 0.1 * sigma);
        assert!(r.p05 < r.mean && r.mean < r.p95);
    }

    #[test]
    fn sparse_bins_are_omitted_with_warning() {
        let samples: Vec<(f64, f64)> =
            (0..50).map(|i| (150.0, i as f64)).chain((0..200).map(|i| (1.5, i as f64))).collect();
        let prof = height_profile(&samples, &DEFAULT_HEIGHT_GRID, 100);
        assert_eq!(prof.rows.len(), 1);
        assert_eq!(prof.rows[0].height_m, 1.5);
        assert_eq!(prof.warnings.len(), 1);
    }

    #[test]
    fn histogram_gaps_are_internal_runs_only() {
        assert_eq!(histogram_gaps(&[55.0, 56.0, 95.0, 150.0], 10.0, 3), 2);
        assert_eq!(histogram_gaps(&[55.0, 56.0, 95.0, 150.0], 10.0, 4), 1);
        assert_eq!(histogram_gaps(&[55.0, 56.0, 65.0], 10.0, 1), 0);
        assert_eq!(histogram_gaps(&[5.0, 45.0, 85.0], 10.0, 3), 2);
        assert_eq!(histogram_gaps(&[], 10.0, 1), 0);
    }

    #[test]
    fn reliability_counts() {
        assert_eq!(reliability(&[200.0, 300.0], 100.0), 1.0);
        assert_eq!(reliability(&[20.0, 30.0], 100.0), 0.0);
        assert_abs_diff_eq!(reliability(&[50e3, 150e3, 250e3], 100e3), 2.0 / 3.0);
    }

    #[test]
    fn nearest_height_bin() {
        assert_eq!(height_bin(&DEFAULT_HEIGHT_GRID, 1.5), 0);
        assert_eq!(height_bin(&DEFAULT_HEIGHT_GRID, 140.0), 6);
        assert_eq!(height_bin(&DEFAULT_HEIGHT_GRID, 299.0), 8);
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_with_midpoint_bounds(v in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            let c = cdf(&v).unwrap();
            let n = v.len() as f64;
            prop_assert!(c.points.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
            prop_assert!(c.points[0].1 >= 1.0 / (2.0 * n) - 1e-15);
            prop_assert!(c.points[c.len() - 1].1 <= 1.0 - 1.0 / (2.0 * n) + 1e-15);
            let med = c.percentile(0.5);
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= med && med <= hi);
        }

        #[test]
        fn merged_reliability_is_weighted_average(
            a in prop::collection::vec(0.0f64..1.0, 1..100),
            b in prop::collection::vec(0.0f64..1.0, 1..100),
            t in 0.0f64..1.0,
        ) {
            let mut ab = a.clone();
            ab.extend(&b);
            let w = (reliability(&a, t) * a.len() as f64 + reliability(&b, t) * b.len() as f64) / ab.len() as f64;
            prop_assert!((reliability(&ab, t) - w).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&reliability(&ab, t)));
        }
    }
}
