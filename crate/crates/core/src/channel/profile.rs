//! Coefficient-driven propagation profile.
//!
//! A profile is a list of height classes. Each class carries its own LoS
//! probability law, log-distance path-loss coefficients for the LoS and NLoS
//! states, shadowing spreads and a Rician K-factor. Path-loss coefficients
//! may drift with user height:
//!
//! ```text
//! PL = (a0 + a_log_h * log10(h)) * log10(d3) + b0 + b_lin_h * (h - 1.5) + c * log10(f_GHz)
//! ```
//!
//! The shipped default follows the urban-macro aerial model (terrestrial
//! class up to 22.5 m, two aerial classes above). It can be replaced by a
//! TOML file with the same layout as [`ChannelProfile`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossCoeffs {
    pub a0: f64,
    #[serde(default)]
    pub a_log_h: f64,
    pub b0: f64,
    #[serde(default)]
    pub b_lin_h: f64,
    pub c: f64,
}

impl PathLossCoeffs {
    pub const FREE_SPACE: PathLossCoeffs = PathLossCoeffs { a0: 20.0, a_log_h: 0.0, b0: 32.45, b_lin_h: 0.0, c: 20.0 };

    pub fn eval(&self, d3: f64, h_user: f64, carrier_ghz: f64) -> f64 {
        let a = self.a0 + self.a_log_h * h_user.log10();
        let b = self.b0 + self.b_lin_h * (h_user - 1.5);
        a * d3.log10() + b + self.c * carrier_ghz.log10()
    }
}

/// `sigma = s0 * exp(s_exp_h * h)` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowSigma {
    pub s0: f64,
    #[serde(default)]
    pub s_exp_h: f64,
}

impl ShadowSigma {
    pub fn eval(&self, h_user: f64) -> f64 {
        self.s0 * (self.s_exp_h * h_user).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum LosProbability {
    /// Ground-level urban macro law with the height-dependent boost term.
    Terrestrial {
        d_full: f64,
        d_decay: f64,
        h_boost_start: f64,
        h_boost_span: f64,
    },
    /// `d1/d + exp(-d/p1)(1 - d1/d)` with `d1`, `p1` logarithmic in height.
    Aerial {
        d1_log_h: f64,
        d1_offset: f64,
        d1_min: f64,
        p1_log_h: f64,
        p1_offset: f64,
    },
    Always,
}

impl LosProbability {
    pub fn eval(&self, d2: f64, h_user: f64) -> f64 {
        let p = match *self {
            LosProbability::Always => 1.0,
            LosProbability::Terrestrial { d_full, d_decay, h_boost_start, h_boost_span } => {
                if d2 <= d_full {
                    1.0
                } else {
                    let c =
                        if h_user <= h_boost_start { 0.0 } else { ((h_user - h_boost_start) / h_boost_span).powf(1.5) };
                    let base = d_full / d2 + (-d2 / d_decay).exp() * (1.0 - d_full / d2);
                    base * (1.0 + c * 1.25 * (d2 / 100.0).powi(3) * (-d2 / 150.0).exp())
                }
            }
            LosProbability::Aerial { d1_log_h, d1_offset, d1_min, p1_log_h, p1_offset } => {
                let lh = h_user.log10();
                let d1 = (d1_log_h * lh + d1_offset).max(d1_min);
                let p1 = p1_log_h * lh + p1_offset;
                if d2 <= d1 {
                    1.0
                } else {
                    d1 / d2 + (-d2 / p1).exp() * (1.0 - d1 / d2)
                }
            }
        };
        p.clamp(0.0, 1.0)
    }
}

/// Dual-slope LoS law: beyond `d_bp = 4 (h_bs - h_env)(h_ut - h_env) f / c`
/// the loss grows with `far_slope * log10(d3 / d_bp)` from its value at `d_bp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Breakpoint {
    pub h_env_m: f64,
    pub far_slope: f64,
}

impl Breakpoint {
    pub fn distance(&self, h_bs: f64, h_user: f64, carrier_ghz: f64) -> Option<f64> {
        let d = 4.0 * (h_bs - self.h_env_m) * (h_user - self.h_env_m) * carrier_ghz * 1e9 / SPEED_OF_LIGHT;
        (d > 0.0).then_some(d)
    }
}

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightClass {
    pub name: String,
    /// Upper bound (inclusive) of user heights covered by this class.
    pub max_height_m: f64,
    pub los_probability: LosProbability,
    pub los: PathLossCoeffs,
    pub nlos: PathLossCoeffs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub los_breakpoint: Option<Breakpoint>,
    pub shadow_los: ShadowSigma,
    pub shadow_nlos: ShadowSigma,
    pub rician_k_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelProfile {
    pub classes: Vec<HeightClass>,
}

impl Default for ChannelProfile {
    fn default() -> Self {
        let aerial_los = PathLossCoeffs { a0: 22.0, a_log_h: 0.0, b0: 28.0, b_lin_h: 0.0, c: 20.0 };
        // 20 log10(40 pi f / 3) folded into b0 and c.
        let aerial_nlos = PathLossCoeffs {
            a0: 46.0,
            a_log_h: -7.0,
            b0: -17.5 + 20.0 * (40.0 * std::f64::consts::PI / 3.0).log10(),
            b_lin_h: 0.0,
            c: 20.0,
        };
        let aerial_shadow_los = ShadowSigma { s0: 4.64, s_exp_h: -0.0066 };
        let aerial_shadow_nlos = ShadowSigma { s0: 6.0, s_exp_h: 0.0 };
        ChannelProfile {
            classes: vec![
                HeightClass {
                    name: "terrestrial".into(),
                    max_height_m: 22.5,
                    los_probability: LosProbability::Terrestrial {
                        d_full: 18.0,
                        d_decay: 63.0,
                        h_boost_start: 13.0,
                        h_boost_span: 10.0,
                    },
                    los: aerial_los,
                    nlos: PathLossCoeffs { a0: 39.08, a_log_h: 0.0, b0: 13.54, b_lin_h: -0.6, c: 20.0 },
                    los_breakpoint: Some(Breakpoint { h_env_m: 1.0, far_slope: 40.0 }),
                    shadow_los: ShadowSigma { s0: 4.0, s_exp_h: 0.0 },
                    shadow_nlos: ShadowSigma { s0: 6.0, s_exp_h: 0.0 },
                    rician_k_db: 9.0,
                },
                HeightClass {
                    name: "aerial_low".into(),
                    max_height_m: 100.0,
                    los_probability: LosProbability::Aerial {
                        d1_log_h: 460.0,
                        d1_offset: -700.0,
                        d1_min: 18.0,
                        p1_log_h: 4300.0,
                        p1_offset: -3800.0,
                    },
                    los: aerial_los,
                    nlos: aerial_nlos,
                    los_breakpoint: None,
                    shadow_los: aerial_shadow_los,
                    shadow_nlos: aerial_shadow_nlos,
                    rician_k_db: 15.0,
                },
                HeightClass {
                    name: "aerial_high".into(),
                    max_height_m: 300.0,
                    los_probability: LosProbability::Always,
                    los: aerial_los,
                    nlos: aerial_nlos,
                    los_breakpoint: None,
                    shadow_los: aerial_shadow_los,
                    shadow_nlos: aerial_shadow_nlos,
                    rician_k_db: 15.0,
                },
            ],
        }
    }
}

impl ChannelProfile {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let p: ChannelProfile = toml::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::Config("channel profile has no height classes".into()));
        }
        let mut prev = 0.0;
        for c in &self.classes {
            if !(c.max_height_m > prev) {
                return Err(Error::Config("profile classes must have increasing max_height_m".into()));
            }
            prev = c.max_height_m;
        }
        Ok(())
    }

    /// Class covering `h_user`; heights above the last bound use the last class.
    pub fn class_for(&self, h_user: f64) -> &HeightClass {
        self.classes
            .iter()
            .find(|c| h_user <= c.max_height_m)
            .unwrap_or_else(|| self.classes.last().expect("validated profile"))
    }

    /// Overrides the K-factor of every aerial class.
    pub fn with_aerial_k(mut self, k_db: f64) -> Self {
        for c in self.classes.iter_mut().skip(1) {
            c.rician_k_db = k_db;
        }
        self
    }
}

pub fn los_probability(profile: &ChannelProfile, d2: f64, h_user: f64) -> f64 {
    profile.class_for(h_user).los_probability.eval(d2, h_user)
}

pub fn free_space_loss(d3: f64, carrier_ghz: f64) -> f64 {
    PathLossCoeffs::FREE_SPACE.eval(d3, 1.5, carrier_ghz)
}

/// Log-distance path loss, never below free space; NLoS never below LoS.
pub fn path_loss(profile: &ChannelProfile, d3: f64, h_user: f64, h_bs: f64, los: bool, carrier_ghz: f64) -> f64 {
    let class = profile.class_for(h_user);
    let d3 = d3.max(1.0);
    let near = |d: f64| class.los.eval(d, h_user, carrier_ghz);
    let pl_los = match class.los_breakpoint.and_then(|b| Some((b, b.distance(h_bs, h_user, carrier_ghz)?))) {
        Some((b, d_bp)) if d3 > d_bp => near(d_bp) + b.far_slope * (d3 / d_bp).log10(),
        _ => near(d3),
    };
    let pl_los = pl_los.max(free_space_loss(d3, carrier_ghz));
    if los {
        pl_los
    } else {
        class.nlos.eval(d3, h_user, carrier_ghz).max(pl_los)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn los_probability_boundaries() {
        let p = ChannelProfile::default();
        assert_eq!(los_probability(&p, 0.0, 1.5), 1.0);
        for d in [10.0, 300.0, 5000.0] {
            assert_eq!(los_probability(&p, d, 150.0), 1.0);
        }
    }

    #[test]
    fn los_probability_ground_level_hand_value() {
        // 18/500 + exp(-500/63) * (1 - 18/500), boost term inactive at 1.5 m.
        let expected = 0.036 + (-500.0f64 / 63.0).exp() * 0.964;
        assert_abs_diff_eq!(expected, 0.036_344_6, epsilon = 1e-7);
        assert_abs_diff_eq!(los_probability(&ChannelProfile::default(), 500.0, 1.5), expected, epsilon = 1e-15);
    }

    #[test]
    fn ground_los_breakpoint_matches_far_field_formula() {
        let p = ChannelProfile::default();
        let d_bp = 4.0 * 24.0 * 0.5 * 2e9 / SPEED_OF_LIGHT;
        assert_abs_diff_eq!(d_bp, 320.22, epsilon = 0.01);
        // Below the breakpoint the single-slope law holds.
        assert_abs_diff_eq!(
            path_loss(&p, 200.0, 1.5, 25.0, true, 2.0),
            28.0 + 22.0 * 200f64.log10() + 20.0 * 2f64.log10(),
            epsilon = 1e-9
        );
        for d in [400.0, 1000.0, 3000.0] {
            let far = 28.0 + 40.0 * f64::log10(d) + 20.0 * 2f64.log10() - 9.0 * (d_bp * d_bp + 23.5f64.powi(2)).log10();
            assert_abs_diff_eq!(path_loss(&p, d, 1.5, 25.0, true, 2.0), far, epsilon = 0.05);
        }
        // Aerial classes keep a single slope.
        assert_abs_diff_eq!(
            path_loss(&p, 3000.0, 50.0, 25.0, true, 2.0) - path_loss(&p, 1000.0, 50.0, 25.0, true, 2.0),
            22.0 * 3f64.log10(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn los_probability_is_monotone_in_height() {
        let p = ChannelProfile::default();
        let heights: Vec<f64> = (0..=600).map(|i| 1.5 + i as f64 * 0.5).collect();
        for d in (0..=60).map(|i| i as f64 * 50.0) {
            let mut last = 0.0;
            for &h in &heights {
                let v = los_probability(&p, d, h);
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= last - 1e-12, "d={d} h={h}: {v} < {last}");
                last = v;
            }
        }
    }

    #[test]
    fn friis_coefficients() {
        let p = ChannelProfile {
            classes: vec![HeightClass {
                los: PathLossCoeffs::FREE_SPACE,
                nlos: PathLossCoeffs::FREE_SPACE,
                ..ChannelProfile::default().classes[2].clone()
            }],
        };
        assert_abs_diff_eq!(path_loss(&p, 1000.0, 150.0, 25.0, true, 2.0), 98.47, epsilon = 0.005);
        let delta = path_loss(&p, 2000.0, 150.0, 25.0, true, 2.0) - path_loss(&p, 1000.0, 150.0, 25.0, true, 2.0);
        assert_abs_diff_eq!(delta, 20.0 * 2f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn nlos_never_below_los_and_los_never_below_free_space() {
        let p = ChannelProfile::default();
        for h in [1.5, 10.0, 22.5, 40.0, 120.0, 300.0] {
            for d in [1.0, 30.0, 200.0, 1500.0, 6000.0] {
                let los = path_loss(&p, d, h, 25.0, true, 2.0);
                let nlos = path_loss(&p, d, h, 25.0, false, 2.0);
                assert!(nlos >= los);
                assert!(los >= free_space_loss(d, 2.0) - 1.0);
            }
        }
    }

    #[test]
    fn profile_round_trips_through_toml() {
        let p = ChannelProfile::default();
        let s = toml::to_string(&p).unwrap();
        assert_eq!(ChannelProfile::from_toml_str(&s).unwrap(), p);
    }

    #[test]
    fn profile_rejects_unordered_classes() {
        let mut p = ChannelProfile::default();
        p.classes.swap(0, 1);
        assert!(p.validate().is_err());
    }
}
