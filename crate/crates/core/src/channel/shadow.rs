//! Spatially correlated shadowing.
//!
//! Each site owns an independent unit-variance field over the ground plane,
//! synthesized as a sum of random-phase sinusoids whose wave vectors are drawn
//! from the spectral density of the 2D exponential kernel
//! `exp(-r / d_corr)` (a bivariate Cauchy law with scale `1 / d_corr`).
//! The field is evaluated at the user's wrap-aware offset from the site, so
//! two users toward the same site see correlation `exp(-dist / d_corr)` and
//! co-located users see identical values.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::deployment::Point3;

#[derive(Debug, Clone)]
pub struct ShadowField {
    /// Per site: `(kx, ky, phase)` for each sinusoid.
    waves: Vec<Vec<(f64, f64, f64)>>,
    scale: f64,
}

impl ShadowField {
    pub fn sample<R: Rng + ?Sized>(n_sites: usize, corr_distance_m: f64, n_waves: usize, rng: &mut R) -> Self {
        assert!(corr_distance_m > 0.0, "correlation distance must be positive");
        assert!(n_waves > 0);
        let waves = (0..n_sites)
            .map(|_| {
                (0..n_waves)
                    .map(|_| {
                        let gx: f64 = StandardNormal.sample(rng);
                        let gy: f64 = StandardNormal.sample(rng);
                        let u: f64 = StandardNormal.sample(rng);
                        let u = u.abs().max(1e-12);
                        let phase = rng.random_range(0.0..std::f64::consts::TAU);
                        (gx / (u * corr_distance_m), gy / (u * corr_distance_m), phase)
                    })
                    .collect()
            })
            .collect();
        ShadowField { waves, scale: (2.0 / n_waves as f64).sqrt() }
    }

    /// Unit-variance field value of `site` at a horizontal offset from it.
    pub fn unit_value(&self, site: usize, offset: Point3) -> f64 {
        self.scale
            * self.waves[site].iter().map(|&(kx, ky, ph)| (kx * offset.x + ky * offset.y + ph).cos()).sum::<f64>()
    }

    pub fn n_sites(&self) -> usize {
        self.waves.len()
    }
}

/// Shadow values in dB for every `(site, user)` pair given the per-link
/// offsets and spreads. `offsets[site][user]` is the wrap-aware displacement
/// from the site to the user; `sigma_db[site][user]` the spread for that link.
pub fn sample_shadow_field<R: Rng + ?Sized>(
    offsets: &[Vec<Point3>],
    sigma_db: &[Vec<f64>],
    corr_distance_m: f64,
    n_waves: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let field = ShadowField::sample(offsets.len(), corr_distance_m, n_waves, rng);
    offsets
        .iter()
        .zip(sigma_db)
        .enumerate()
        .map(|(site, (offs, sig))| offs.iter().zip(sig).map(|(&o, &s)| s * field.unit_value(site, o)).collect())
        .collect()
}
