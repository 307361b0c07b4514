//! Single-user sectorized downlink: one user per PRB and a fixed
//! equal-phase combiner at every BS.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deployment::CellId;
use crate::error::{Error, Result};

pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;
pub const UE_NOISE_FIGURE_DB: f64 = 9.0;
pub const BS_NOISE_FIGURE_DB: f64 = 7.0;

/// Thermal noise power over `bandwidth_hz` in dBm.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuScheduleSlot {
    pub cell: CellId,
    pub prb: usize,
    pub user: usize,
}

/// Round-robin: PRB `p` goes to `users[(p + offset) mod K]`.
pub fn schedule_su(cell: CellId, users: &[usize], n_prb: usize, offset: usize) -> Vec<SuScheduleSlot> {
    if users.is_empty() {
        return Vec::new();
    }
    (0..n_prb).map(|prb| SuScheduleSlot { cell, prb, user: users[(prb + offset) % users.len()] }).collect()
}

pub fn prbs_held(schedule: &[SuScheduleSlot], user: usize) -> impl Iterator<Item = usize> + '_ {
    schedule.iter().filter(move |s| s.user == user).map(|s| s.prb)
}

/// SINR with unit-norm combiners: `serving` and `interferers` hold `h^H w`
/// toward the target for the serving cell and for every other transmitting
/// cell on the PRB.
pub fn sinr_su_unchecked(serving: Complex64, interferers: &[Complex64], p_b_mw: f64, sigma2_mw: f64) -> f64 {
    let i: f64 = interferers.iter().map(|g| g.norm_sqr()).sum();
    p_b_mw * serving.norm_sqr() / (p_b_mw * i + sigma2_mw)
}

/// [`sinr_su_unchecked`] after checking that `target` holds `prb` in the
/// serving cell's schedule.
pub fn sinr_su(
    target: usize,
    prb: usize,
    schedule: &[SuScheduleSlot],
    serving: Complex64,
    interferers: &[Complex64],
    p_b_mw: f64,
    sigma2_mw: f64,
) -> Result<f64> {
    if !schedule.iter().any(|s| s.prb == prb && s.user == target) {
        return Err(Error::NotScheduled { user: target, prb });
    }
    Ok(sinr_su_unchecked(serving, interferers, p_b_mw, sigma2_mw))
}
