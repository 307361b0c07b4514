//! Large-scale attenuation and directional small-scale fading.

pub mod profile;
pub mod shadow;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::antenna::{su_combining_gain, ArrayGeometry, ElementPattern};
use crate::error::{Error, Result};

pub use profile::{los_probability, path_loss, ChannelProfile};
pub use shadow::{sample_shadow_field, ShadowField};

/// K-factors above this are treated as a pure LoS ray.
pub const MAX_RICIAN_K_DB: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct O2iConfig {
    pub mean_db: f64,
    pub per_m_db: f64,
    pub max_indoor_m: f64,
}

impl Default for O2iConfig {
    fn default() -> Self {
        O2iConfig { mean_db: 20.0, per_m_db: 0.5, max_indoor_m: 25.0 }
    }
}

impl O2iConfig {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.mean_db + self.per_m_db * rng.random_range(0.0..=self.max_indoor_m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// Optional TOML profile; the built-in profile is used when absent.
    pub profile_file: Option<String>,
    pub shadow_corr_m: f64,
    pub shadow_enabled: bool,
    pub shadow_waves: usize,
    pub o2i: O2iConfig,
    /// K-factor of LoS links for aerial users.
    pub rician_k_db: f64,
    /// Width in PRBs of a block sharing one small-scale realization.
    pub prb_group: usize,
    pub carrier_ghz: f64,
    /// When false every link reduces to its deterministic LoS ray at the
    /// large-scale power, which makes drops hand-checkable.
    pub small_scale_fading: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            profile_file: None,
            shadow_corr_m: 50.0,
            shadow_enabled: true,
            shadow_waves: 64,
            o2i: O2iConfig::default(),
            rician_k_db: 15.0,
            prb_group: 50,
            carrier_ghz: 2.0,
            small_scale_fading: true,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.shadow_corr_m > 0.0) {
            return Err(Error::Config("channel: shadow_corr_m must be positive".into()));
        }
        if self.shadow_waves == 0 {
            return Err(Error::Config("channel: shadow_waves must be positive".into()));
        }
        if self.prb_group == 0 {
            return Err(Error::Config("channel: prb_group must be positive".into()));
        }
        if !(self.carrier_ghz > 0.0) {
            return Err(Error::Config("channel: carrier_ghz must be positive".into()));
        }
        if !(self.o2i.mean_db >= 0.0 && self.o2i.per_m_db >= 0.0 && self.o2i.max_indoor_m >= 0.0) {
            return Err(Error::Config("channel: o2i terms must be non-negative".into()));
        }
        Ok(())
    }

    /// Resolves the profile (file or built-in) and applies the K override.
    pub fn resolve_profile(&self) -> Result<ChannelProfile> {
        let p = match &self.profile_file {
            Some(path) => ChannelProfile::load(std::path::Path::new(path))?,
            None => ChannelProfile::default(),
        };
        Ok(p.with_aerial_k(self.rician_k_db))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleState {
    pub los: bool,
    pub path_loss_db: f64,
    pub shadow_db: f64,
    pub o2i_db: f64,
    /// Relative to the sector bearing.
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl LargeScaleState {
    /// Attenuation excluding antenna gain, in dB (positive).
    pub fn attenuation_db(&self) -> f64 {
        self.path_loss_db + self.shadow_db + self.o2i_db
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub large_scale: LargeScaleState,
    pub rician_k_db: f64,
}

/// Linear amplitude of `element gain - attenuation` for one port.
pub fn large_scale_amplitude(geometry: &ArrayGeometry, pattern: &ElementPattern, ls: &LargeScaleState) -> f64 {
    let g = geometry.element_gain_toward(pattern, ls.azimuth_deg, ls.elevation_deg) - ls.attenuation_db();
    10f64.powf(g / 20.0)
}

/// Splits total power into `(LoS amplitude, diffuse amplitude)` for a K-factor.
pub fn rician_split(los: bool, rician_k_db: f64) -> (f64, f64) {
    if !los {
        return (0.0, 1.0);
    }
    let k = 10f64.powf(rician_k_db.min(MAX_RICIAN_K_DB) / 10.0);
    ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Antenna-domain channel vector:
/// `g * (sqrt(K/(K+1)) e^{j psi} a + sqrt(1/(K+1)) z)`, with the second
/// polarization port of each element carrying an extra random phase on the
/// LoS ray.
pub fn synth_channel<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    large_scale: &LargeScaleState,
    rician_k_db: f64,
    rng: &mut R,
) -> ChannelRealization {
    let amp = large_scale_amplitude(geometry, pattern, large_scale);
    let (a_los, a_nlos) = rician_split(large_scale.los, rician_k_db);
    let psi = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let chi = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let ports = geometry.polarization.ports();
    let steer = geometry.steering_vector(large_scale.azimuth_deg, large_scale.elevation_deg);
    let h = steer
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let pol = if i % ports == 1 { chi } else { Complex64::new(1.0, 0.0) };
            let los = psi * pol * a * a_los;
            let nlos = if a_nlos > 0.0 { complex_normal(rng) * a_nlos } else { Complex64::new(0.0, 0.0) };
            (los + nlos) * amp
        })
        .collect();
    ChannelRealization { h, large_scale: *large_scale, rician_k_db }
}

/// `h^H w` for the unit-norm equal-weight combiner `w = 1/sqrt(N)` of a
/// single-column panel, drawn directly from its distribution: the LoS ray
/// projects deterministically and the diffuse part collapses to one
/// unit-variance complex Gaussian.
pub fn synth_combined<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    large_scale: &LargeScaleState,
    rician_k_db: f64,
    rng: &mut R,
) -> Complex64 {
    let amp = large_scale_amplitude(geometry, pattern, large_scale);
    let (a_los, a_nlos) = rician_split(large_scale.los, rician_k_db);
    let psi = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let chi = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let diffuse = complex_normal(rng);
    let n = geometry.n_antennas() as f64;
    let ports = geometry.polarization.ports();
    let los = if a_los > 0.0 {
        // sum_i conj(pol_i a_i) = conj((1 + chi) * sum over elements of a_e) for dual ports.
        let element_sum: Complex64 =
            geometry.steering_vector(large_scale.azimuth_deg, large_scale.elevation_deg).iter().step_by(ports).sum();
        let pol_sum = if ports == 2 { Complex64::new(1.0, 0.0) + chi } else { Complex64::new(1.0, 0.0) };
        (psi * pol_sum * element_sum).conj() * a_los / n.sqrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    (los + diffuse.conj() * a_nlos) * amp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    SuCombined,
    FirstRfChain,
}

/// Antenna gain minus attenuation toward the serving BS, in dB.
pub fn coupling_loss(
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    large_scale: &LargeScaleState,
    mode: CouplingMode,
) -> Result<f64> {
    let gain = match mode {
        CouplingMode::SuCombined => {
            su_combining_gain(geometry, pattern, large_scale.azimuth_deg, large_scale.elevation_deg)?
        }
        CouplingMode::FirstRfChain => {
            geometry.element_gain_toward(pattern, large_scale.azimuth_deg, large_scale.elevation_deg)
        }
    };
    Ok(gain - large_scale.attenuation_db())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    fn ls(los: bool) -> LargeScaleState {
        LargeScaleState { los, path_loss_db: 100.0, shadow_db: 0.0, o2i_db: 0.0, azimuth_deg: 17.0, elevation_deg: 9.0 }
    }

    fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn strong_los_is_collinear_with_steering() {
        let g = ArrayGeometry::multi_user();
        let p = ElementPattern::default();
        let s = ls(true);
        let a = g.steering_vector(s.azimuth_deg, s.elevation_deg);
        let mut rng = seeded(1);
        let r = synth_channel(&g, &p, &s, 100.0, &mut rng);
        // Collinear within each polarization.
        let even: Vec<_> = r.h.iter().step_by(2).cloned().collect();
        let a_even: Vec<_> = a.iter().step_by(2).cloned().collect();
        let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let c = inner(&even, &a_even).norm() / (norm(&even) * norm(&a_even));
        assert!(c > 0.9999, "{c}");
    }

    #[test]
    fn k20_los_is_nearly_collinear() {
        let g = ArrayGeometry::multi_user();
        let p = ElementPattern::default();
        let s = ls(true);
        let a = g.steering_vector(s.azimuth_deg, s.elevation_deg);
        let a_even: Vec<_> = a.iter().step_by(2).cloned().collect();
        let mut rng = seeded(2);
        for _ in 0..50 {
            let r = synth_channel(&g, &p, &s, 20.0, &mut rng);
            let even: Vec<_> = r.h.iter().step_by(2).cloned().collect();
            let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let c = inner(&even, &a_even).norm() / (norm(&even) * norm(&a_even));
            assert!(c >= 0.97, "{c}");
        }
    }

    #[test]
    fn rayleigh_per_antenna_power_is_uniform() {
        let g = ArrayGeometry::multi_user();
        let p = ElementPattern::default();
        let s = LargeScaleState { path_loss_db: 0.0, ..ls(false) };
        let mut rng = seeded(3);
        let n = 10_000;
        let mut acc = vec![0.0; 128];
        for _ in 0..n {
            let r = synth_channel(&g, &p, &s, 15.0, &mut rng);
            for (a, h) in acc.iter_mut().zip(&r.h) {
                *a += h.norm_sqr();
            }
        }
        let expected = 10f64.powf(g.element_gain_toward(&p, s.azimuth_deg, s.elevation_deg) / 10.0);
        for a in acc {
            let m = a / n as f64;
            assert!((m / expected - 1.0).abs() < 0.05, "{m} vs {expected}");
        }
    }

    #[test]
    fn energy_matches_large_scale_power() {
        let g = ArrayGeometry::multi_user();
        let p = ElementPattern::default();
        for los in [true, false] {
            let s = ls(los);
            let amp = large_scale_amplitude(&g, &p, &s);
            let mut rng = seeded(4);
            let n = 10_000;
            let mean: f64 = (0..n)
                .map(|_| synth_channel(&g, &p, &s, 15.0, &mut rng).h.iter().map(|h| h.norm_sqr()).sum::<f64>() / 128.0)
                .sum::<f64>()
                / n as f64;
            assert!((mean / (amp * amp) - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_channel() {
        let g = ArrayGeometry::multi_user();
        let p = ElementPattern::default();
        let s = LargeScaleState { path_loss_db: f64::INFINITY, ..ls(true) };
        let r = synth_channel(&g, &p, &s, 15.0, &mut seeded(5));
        assert!(r.h.iter().all(|h| h.norm() == 0.0));
    }

    #[test]
    fn combined_scalar_matches_vector_statistics() {
        let g = ArrayGeometry::single_user();
        let p = ElementPattern::default();
        let n = 20_000;
        for (los, k) in [(true, 9.0), (false, 0.0), (true, 30.0)] {
            let s = LargeScaleState { elevation_deg: -5.0, ..ls(los) };
            let w = 1.0 / (g.n_antennas() as f64).sqrt();
            let mut rng = seeded(6);
            let (mut m1, mut m2) = (0.0, 0.0);
            for _ in 0..n {
                let r = synth_channel(&g, &p, &s, k, &mut rng);
                let y: Complex64 = r.h.iter().map(|h| h.conj() * w).sum();
                m1 += y.norm_sqr();
                m2 += y.norm_sqr().powi(2);
            }
            let (mut c1, mut c2) = (0.0, 0.0);
            for _ in 0..n {
                let y = synth_combined(&g, &p, &s, k, &mut rng);
                c1 += y.norm_sqr();
                c2 += y.norm_sqr().powi(2);
            }
            assert!((c1 / m1 - 1.0).abs() < 0.05, "mean power los={los}: {} vs {}", c1, m1);
            assert!((c2 / m2 - 1.0).abs() < 0.1, "second moment los={los}");
        }
    }

    #[test]
    fn coupling_loss_examples() {
        let g = ArrayGeometry::single_user();
        let p = ElementPattern::default();
        let s = LargeScaleState { azimuth_deg: 0.0, elevation_deg: -12.0, ..ls(true) };
        assert_abs_diff_eq!(coupling_loss(&g, &p, &s, CouplingMode::FirstRfChain).unwrap(), -92.0, epsilon = 1e-9);
        let su = coupling_loss(&g, &p, &s, CouplingMode::SuCombined).unwrap();
        let af = g.equal_weight_array_factor(0.0, -12.0);
        assert_abs_diff_eq!(su - (-92.0), 10.0 * af.log10(), epsilon = 1e-9);
        let err = coupling_loss(&ArrayGeometry::multi_user(), &p, &s, CouplingMode::SuCombined);
        assert!(err.is_err());
    }

    #[test]
    fn o2i_bounds() {
        let c = O2iConfig::default();
        let mut rng = seeded(9);
        for _ in 0..1000 {
            let v = c.sample(&mut rng);
            assert!((20.0..=32.5).contains(&v));
        }
    }
}
