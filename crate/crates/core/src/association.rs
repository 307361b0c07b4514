//! RSRP and serving-cell selection.

use serde::{Deserialize, Serialize};

use crate::antenna::{su_combining_gain, ArrayGeometry, ElementPattern};
use crate::channel::LargeScaleState;
use crate::deployment::{wrap_displacement, CellId, NetworkLayout, UserDrop, UserKind};
use crate::error::Result;

/// Network operating mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Su,
    Mu,
}

impl std::str::FromStr for Mode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(Mode::Su),
            "mu" => Ok(Mode::Mu),
            other => Err(crate::error::Error::Config(format!("unknown mode `{other}` (expected su or mu)"))),
        }
    }
}

/// Antenna gain used for the reference signal. In `Su` mode this is the fixed
/// combiner gain of the column; in `Mu` mode the element gain plus the full
/// coherent gain of the panel.
pub fn reference_gain_dbi(
    mode: Mode,
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    azimuth_deg: f64,
    elevation_deg: f64,
) -> Result<f64> {
    match mode {
        Mode::Su => su_combining_gain(geometry, pattern, azimuth_deg, elevation_deg),
        Mode::Mu => Ok(geometry.element_gain_toward(pattern, azimuth_deg, elevation_deg)
            + 10.0 * (geometry.n_antennas() as f64).log10()),
    }
}

/// Received reference power in dBm from a BS radiating `tx_power_dbm`.
pub fn rsrp(
    mode: Mode,
    tx_power_dbm: f64,
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    large_scale: &LargeScaleState,
) -> Result<f64> {
    let g = reference_gain_dbi(mode, geometry, pattern, large_scale.azimuth_deg, large_scale.elevation_deg)?;
    Ok(tx_power_dbm + g - large_scale.attenuation_db())
}

/// Index of the largest entry; the first one wins ties.
pub fn best_cell(rsrp_dbm: &[f64]) -> CellId {
    let mut best = 0;
    for (c, &v) in rsrp_dbm.iter().enumerate() {
        if v > rsrp_dbm[best] {
            best = c;
        }
    }
    best
}

/// Sets `serving_cell` of every user. `rsrp_dbm[u][c]` is the RSRP of cell
/// `c` at user `u`.
pub fn associate(users: &mut [UserDrop], rsrp_dbm: &[Vec<f64>]) -> Vec<CellId> {
    users
        .iter_mut()
        .zip(rsrp_dbm)
        .map(|(u, r)| {
            let c = best_cell(r);
            u.serving_cell = Some(c);
            c
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRecord {
    pub user_id: usize,
    pub kind: UserKind,
    pub height_m: f64,
    pub serving_cell: CellId,
    pub d2: f64,
    pub d3: f64,
    pub gain_dbi: f64,
}

/// Serving-link distances and gains for associated users. `serving_gain_dbi`
/// is aligned with `users`.
pub fn association_stats(
    layout: &NetworkLayout,
    users: &[UserDrop],
    serving_gain_dbi: &[f64],
) -> Vec<AssociationRecord> {
    users
        .iter()
        .zip(serving_gain_dbi)
        .filter_map(|(u, &g)| {
            let cell = u.serving_cell?;
            let d = wrap_displacement(layout, layout.bs_position(layout.site_of(cell)), u.position);
            Some(AssociationRecord {
                user_id: u.user_id,
                kind: u.kind,
                height_m: u.height(),
                serving_cell: cell,
                d2: d.d2,
                d3: d.d3,
                gain_dbi: g,
            })
        })
        .collect()
}
