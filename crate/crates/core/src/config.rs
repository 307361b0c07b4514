//! Scenario configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::antenna::{ArrayGeometry, ElementPattern, Polarization};
use crate::association::Mode;
use crate::channel::ChannelConfig;
use crate::deployment::DeploymentConfig;
use crate::error::{Error, Result};
use crate::link_adaptation::{McsTable, DEFAULT_OVERHEAD_FACTOR, PRB_BANDWIDTH_HZ};
use crate::metrics::MetricsConfig;
use crate::phy_mu::{CsiMode, PowerControl, UplinkPowerParams, DEFAULT_K_MAX, DEFAULT_PILOT_LENGTH};
use crate::phy_su::{dbm_to_mw, noise_power_dbm, BS_NOISE_FIGURE_DB, UE_NOISE_FIGURE_DB};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerConfig {
    pub bs_tx_dbm: f64,
    pub bandwidth_mhz: f64,
    pub n_prb: usize,
    pub ue_noise_figure_db: f64,
    pub bs_noise_figure_db: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            bs_tx_dbm: 46.0,
            bandwidth_mhz: 10.0,
            n_prb: 50,
            ue_noise_figure_db: UE_NOISE_FIGURE_DB,
            bs_noise_figure_db: BS_NOISE_FIGURE_DB,
        }
    }
}

impl PowerConfig {
    /// Per-PRB transmit power `P_B / F` in dBm.
    pub fn prb_tx_dbm(&self) -> f64 {
        self.bs_tx_dbm - 10.0 * (self.n_prb as f64).log10()
    }

    pub fn prb_tx_mw(&self) -> f64 {
        dbm_to_mw(self.prb_tx_dbm())
    }

    pub fn ue_noise_mw(&self) -> f64 {
        dbm_to_mw(noise_power_dbm(PRB_BANDWIDTH_HZ, self.ue_noise_figure_db))
    }

    pub fn bs_noise_mw(&self) -> f64 {
        dbm_to_mw(noise_power_dbm(PRB_BANDWIDTH_HZ, self.bs_noise_figure_db))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_prb == 0 {
            return Err(Error::Config("power: n_prb must be positive".into()));
        }
        if self.n_prb as f64 * PRB_BANDWIDTH_HZ > self.bandwidth_mhz * 1e6 + 1e-3 {
            return Err(Error::Config("power: PRBs do not fit in the bandwidth".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntennaConfig {
    pub element: ElementPattern,
    pub spacing_wl: f64,
    pub downtilt_deg: f64,
    pub polarization: Polarization,
    pub su_rows: usize,
    pub su_cols: usize,
    pub mu_rows: usize,
    pub mu_cols: usize,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        let su = ArrayGeometry::single_user();
        let mu = ArrayGeometry::multi_user();
        AntennaConfig {
            element: ElementPattern::default(),
            spacing_wl: su.spacing_wl,
            downtilt_deg: su.downtilt_deg,
            polarization: su.polarization,
            su_rows: su.rows,
            su_cols: su.cols,
            mu_rows: mu.rows,
            mu_cols: mu.cols,
        }
    }
}

impl AntennaConfig {
    pub fn geometry(&self, mode: Mode) -> ArrayGeometry {
        let (rows, cols) = match mode {
            Mode::Su => (self.su_rows, self.su_cols),
            Mode::Mu => (self.mu_rows, self.mu_cols),
        };
        ArrayGeometry {
            rows,
            cols,
            spacing_wl: self.spacing_wl,
            downtilt_deg: self.downtilt_deg,
            polarization: self.polarization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.element;
        if !(e.hpbw_h_deg > 0.0 && e.hpbw_v_deg > 0.0 && e.side_floor_db >= 0.0 && e.back_floor_db >= 0.0) {
            return Err(Error::Config("antenna: beamwidths must be positive and floors non-negative".into()));
        }
        if self.su_rows == 0 || self.mu_rows == 0 || self.mu_cols == 0 || self.su_cols != 1 {
            return Err(Error::Config(
                "antenna: the single-user panel is one column; array sizes must be positive".into(),
            ));
        }
        if !(self.spacing_wl > 0.0) || !(-90.0..=90.0).contains(&self.downtilt_deg) {
            return Err(Error::Config("antenna: invalid spacing or downtilt".into()));
        }
        Ok(())
    }
}

/// The three multi-user CSI configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiConfig {
    Perfect,
    /// Reuse-3 pilots with fractional uplink power control.
    R3Pc,
    /// Reuse-3 pilots with every user at maximum power.
    R3Ep,
}

impl CsiConfig {
    pub fn csi_mode(&self) -> CsiMode {
        match self {
            CsiConfig::Perfect => CsiMode::Perfect,
            _ => CsiMode::LsContaminated,
        }
    }

    pub fn power_control(&self) -> PowerControl {
        match self {
            CsiConfig::R3Ep => PowerControl::EqualPower,
            _ => PowerControl::Fractional,
        }
    }
}

impl std::str::FromStr for CsiConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(CsiConfig::Perfect),
            "r3_pc" => Ok(CsiConfig::R3Pc),
            "r3_ep" => Ok(CsiConfig::R3Ep),
            other => Err(Error::Config(format!("unknown csi_mode `{other}` (expected perfect, r3_pc or r3_ep)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuConfig {
    pub m_p: usize,
    pub k_max: usize,
    pub csi_mode: CsiConfig,
    pub pc: UplinkPowerParams,
    /// Interfering links weaker than the user's strongest link by more than
    /// this many dB enter the SINR through their mean power.
    pub exact_margin_db: f64,
}

impl Default for MuConfig {
    fn default() -> Self {
        MuConfig {
            m_p: DEFAULT_PILOT_LENGTH,
            k_max: DEFAULT_K_MAX,
            csi_mode: CsiConfig::R3Pc,
            pc: UplinkPowerParams::default(),
            exact_margin_db: 40.0,
        }
    }
}

impl MuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Config("mu: k_max must be positive".into()));
        }
        if self.m_p < 3 * self.k_max {
            return Err(Error::PilotsTooShort { m_p: self.m_p, k_max: self.k_max });
        }
        if !(self.exact_margin_db >= 0.0) {
            return Err(Error::Config("mu: exact_margin_db must be non-negative".into()));
        }
        self.pc.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McsConfig {
    /// CSV with `threshold_db,efficiency` rows; the built-in ladder when absent.
    pub table_file: Option<String>,
    pub overhead_factor: f64,
}

impl Default for McsConfig {
    fn default() -> Self {
        McsConfig { table_file: None, overhead_factor: DEFAULT_OVERHEAD_FACTOR }
    }
}

impl McsConfig {
    pub fn resolve_table(&self) -> Result<McsTable> {
        match &self.table_file {
            Some(p) => McsTable::from_csv(&std::fs::read_to_string(p)?),
            None => Ok(McsTable::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.overhead_factor > 0.0 && self.overhead_factor <= 1.0) {
            return Err(Error::Config("mcs: overhead_factor must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub drops: usize,
    pub seed: u64,
    pub power: PowerConfig,
    pub deployment: DeploymentConfig,
    pub antenna: AntennaConfig,
    pub channel: ChannelConfig,
    pub mu: MuConfig,
    pub mcs: McsConfig,
    pub metrics: MetricsConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mode: Mode::Su,
            drops: 200,
            seed: 1,
            power: PowerConfig::default(),
            deployment: DeploymentConfig::default(),
            antenna: AntennaConfig::default(),
            channel: ChannelConfig::default(),
            mu: MuConfig::default(),
            mcs: McsConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

fn rebase(base: &Path, p: &mut Option<String>) {
    if let Some(s) = p {
        let path = PathBuf::from(&*s);
        if path.is_relative() {
            *s = base.join(path).to_string_lossy().into_owned();
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative auxiliary paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ScenarioConfig = toml::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        rebase(base, &mut cfg.channel.profile_file);
        rebase(base, &mut cfg.mcs.table_file);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every subtree, including that referenced files parse.
    pub fn validate(&self) -> Result<()> {
        self.power.validate()?;
        self.deployment.validate()?;
        self.antenna.validate()?;
        self.channel.validate()?;
        self.mu.validate()?;
        self.mcs.validate()?;
        self.metrics.validate()?;
        self.channel.resolve_profile()?;
        self.mcs.resolve_table()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn defaults_validate() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn per_prb_power() {
        let p = PowerConfig::default();
        assert_abs_diff_eq!(p.prb_tx_dbm(), 29.0103, epsilon = 1e-4);
        assert_abs_diff_eq!(10.0 * p.ue_noise_mw().log10(), -112.447, epsilon = 1e-3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml_str("mode = \"su\"\ncolour = 3\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[deployment]\ntierz = 3\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[mu.pc]\nalpha = 0.7\nbeta = 1\n").is_err());
    }

    #[test]
    fn partial_files_take_defaults() {
        let c = ScenarioConfig::from_toml_str(
            "mode = \"mu\"\n[deployment]\ncase = \"case5\"\n[mu]\ncsi_mode = \"r3_ep\"\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::Mu);
        assert_eq!(c.deployment.case, crate::deployment::Case::Case5);
        assert_eq!(c.mu.csi_mode, CsiConfig::R3Ep);
        assert_eq!(c.deployment.tiers, DeploymentConfig::default().tiers);
    }

    #[test]
    fn round_trip() {
        let c = ScenarioConfig { seed: 99, drops: 3, ..Default::default() };
        let back = ScenarioConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(ScenarioConfig::from_toml_str("[mu]\nm_p = 12\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[mu.pc]\nalpha = 1.5\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[mcs]\noverhead_factor = 0\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[power]\nn_prb = 60\n").is_err());
    }
}
