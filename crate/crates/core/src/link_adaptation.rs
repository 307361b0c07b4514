//! SINR to spectral efficiency and user rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth of one PRB in Hz.
pub const PRB_BANDWIDTH_HZ: f64 = 180e3;

/// Fraction of symbols left for data after 3 of 14 control symbols.
pub const DEFAULT_OVERHEAD_FACTOR: f64 = 11.0 / 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsRow {
    pub threshold_db: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McsTable {
    pub rows: Vec<McsRow>,
}

/// Default ladder: first two thresholds at -5.02 and -4.12 dB, then evenly
/// spaced up to 25.87 dB. Efficiencies follow `0.9631 log2(1 + SINR / 1.8348)`,
/// the scaled-Shannon curve through (−5.02 dB, 0.22) and (25.87 dB, 7.44).
const DEFAULT_ROWS: [(f64, f64); 15] = [
    (-5.02, 0.22),
    (-4.12, 0.2661),
    (-1.81, 0.4262),
    (0.49, 0.6623),
    (2.80, 0.9897),
    (5.11, 1.4140),
    (7.41, 1.9280),
    (9.72, 2.5152),
    (12.03, 3.1563),
    (14.34, 3.8340),
    (16.64, 4.5353),
    (18.95, 5.2513),
    (21.26, 5.9762),
    (23.56, 6.7065),
    (25.87, 7.44),
];

impl Default for McsTable {
    fn default() -> Self {
        McsTable {
            rows: DEFAULT_ROWS.iter().map(|&(threshold_db, efficiency)| McsRow { threshold_db, efficiency }).collect(),
        }
    }
}

impl McsTable {
    pub fn new(rows: Vec<McsRow>) -> Result<Self> {
        let t = McsTable { rows };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Config("mcs: table is empty".into()));
        }
        for w in self.rows.windows(2) {
            if !(w[1].threshold_db > w[0].threshold_db && w[1].efficiency > w[0].efficiency) {
                return Err(Error::Config("mcs: thresholds and efficiencies must be strictly increasing".into()));
            }
        }
        if !(self.rows[0].efficiency > 0.0) {
            return Err(Error::Config("mcs: efficiencies must be positive".into()));
        }
        Ok(())
    }

    /// Rows as `threshold_db,efficiency` CSV lines (with header).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let mut it = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (it.next(), it.next()) else {
                return Err(Error::Config(format!("mcs: malformed row `{line}`")));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(threshold_db), Ok(efficiency)) => rows.push(McsRow { threshold_db, efficiency }),
                _ if rows.is_empty() => continue, // header
                _ => return Err(Error::Config(format!("mcs: malformed row `{line}`"))),
            }
        }
        Self::new(rows)
    }

    pub fn min_threshold_db(&self) -> f64 {
        self.rows[0].threshold_db
    }
}

/// Efficiency of the highest row whose threshold does not exceed `sinr_db`,
/// zero below the first row.
pub fn select_mcs(table: &McsTable, sinr_db: f64) -> f64 {
    let idx = table.rows.partition_point(|r| r.threshold_db <= sinr_db);
    if idx == 0 {
        0.0
    } else {
        table.rows[idx - 1].efficiency
    }
}

pub fn user_rate(efficiency: f64, prbs_held: f64, overhead_factor: f64) -> f64 {
    efficiency * PRB_BANDWIDTH_HZ * prbs_held * overhead_factor
}
