//! BS element pattern, panel geometry and steering vectors.
//!
//! Angles handed to this module are measured at the BS: azimuth relative to
//! the sector bearing, elevation relative to the horizon (positive upwards).
//! The mechanical downtilt rotates the whole panel, so both the element
//! pattern and the array phases are evaluated in panel-local coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElementPattern {
    pub hpbw_h_deg: f64,
    pub hpbw_v_deg: f64,
    pub max_gain_dbi: f64,
    pub side_floor_db: f64,
    pub back_floor_db: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        ElementPattern {
            hpbw_h_deg: 65.0,
            hpbw_v_deg: 65.0,
            max_gain_dbi: 8.0,
            side_floor_db: 30.0,
            back_floor_db: 30.0,
        }
    }
}

impl ElementPattern {
    /// Gain in panel-local coordinates, boresight at `(0, 0)`.
    pub fn gain_dbi(&self, azimuth_deg: f64, elevation_deg: f64) -> f64 {
        let a_h = -(12.0 * (azimuth_deg / self.hpbw_h_deg).powi(2)).min(self.side_floor_db);
        let a_v = -(12.0 * (elevation_deg / self.hpbw_v_deg).powi(2)).min(self.side_floor_db);
        self.max_gain_dbi - (-(a_h + a_v)).min(self.back_floor_db)
    }
}

/// Free function form of [`ElementPattern::gain_dbi`].
pub fn element_gain(pattern: &ElementPattern, azimuth_deg: f64, elevation_deg: f64) -> f64 {
    pattern.gain_dbi(azimuth_deg, elevation_deg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Single,
    /// Two co-located ±45° ports per element.
    XpolDualPort,
}

impl Polarization {
    pub fn ports(&self) -> usize {
        match self {
            Polarization::Single => 1,
            Polarization::XpolDualPort => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    pub spacing_wl: f64,
    pub downtilt_deg: f64,
    pub polarization: Polarization,
}

impl ArrayGeometry {
    /// 8x1 X-POL column fed by one RF chain.
    pub fn single_user() -> Self {
        ArrayGeometry {
            rows: 8,
            cols: 1,
            spacing_wl: 0.5,
            downtilt_deg: 12.0,
            polarization: Polarization::XpolDualPort,
        }
    }

    /// 8x8 X-POL panel with one RF chain per port.
    pub fn multi_user() -> Self {
        ArrayGeometry { cols: 8, ..Self::single_user() }
    }

    pub fn n_antennas(&self) -> usize {
        self.rows * self.cols * self.polarization.ports()
    }

    pub fn is_single_column(&self) -> bool {
        self.cols == 1
    }

    /// Rotates a BS-frame direction into panel coordinates, returning
    /// `(azimuth, elevation)` in degrees.
    pub fn to_local(&self, azimuth_deg: f64, elevation_deg: f64) -> (f64, f64) {
        let (x, y, z) = self.local_direction(azimuth_deg, elevation_deg);
        (y.atan2(x).to_degrees(), z.clamp(-1.0, 1.0).asin().to_degrees())
    }

    fn local_direction(&self, azimuth_deg: f64, elevation_deg: f64) -> (f64, f64, f64) {
        let (sa, ca) = azimuth_deg.to_radians().sin_cos();
        let (se, ce) = elevation_deg.to_radians().sin_cos();
        let (x, y, z) = (ce * ca, ce * sa, se);
        let (st, ct) = self.downtilt_deg.to_radians().sin_cos();
        (x * ct - z * st, y, x * st + z * ct)
    }

    /// Element gain toward a BS-frame direction.
    pub fn element_gain_toward(&self, pattern: &ElementPattern, azimuth_deg: f64, elevation_deg: f64) -> f64 {
        let (az, el) = self.to_local(azimuth_deg, elevation_deg);
        pattern.gain_dbi(az, el)
    }

    /// Unit-modulus array response, ordered `(row, col, port)` with the port
    /// index fastest. Row 0, column 0 has zero phase.
    pub fn steering_vector(&self, azimuth_deg: f64, elevation_deg: f64) -> Vec<Complex64> {
        let (_, uy, uz) = self.local_direction(azimuth_deg, elevation_deg);
        let k = 2.0 * std::f64::consts::PI * self.spacing_wl;
        let ports = self.polarization.ports();
        // The phase is separable in (row, column).
        let along = |n: usize, u: f64| -> Vec<Complex64> {
            (0..n).map(|i| Complex64::from_polar(1.0, k * i as f64 * u)).collect()
        };
        let (vertical, horizontal) = (along(self.rows, uz), along(self.cols, uy));
        let mut a = Vec::with_capacity(self.n_antennas());
        for v in &vertical {
            for h in &horizontal {
                a.extend(std::iter::repeat_n(v * h, ports));
            }
        }
        a
    }

    /// `|sum of steering entries|^2 / N`, i.e. the power gain of the
    /// equal-weight combiner over a single port.
    pub fn equal_weight_array_factor(&self, azimuth_deg: f64, elevation_deg: f64) -> f64 {
        let (_, uy, uz) = self.local_direction(azimuth_deg, elevation_deg);
        let k = std::f64::consts::PI * self.spacing_wl;
        let n = self.n_antennas() as f64;
        let ports = self.polarization.ports() as f64;
        let col = dirichlet(self.rows, k * uz);
        let row = dirichlet(self.cols, k * uy);
        (ports * col * row).powi(2) / n
    }
}

/// `|sum_{m<n} e^{j 2 m x}|` evaluated in closed form.
fn dirichlet(n: usize, x: f64) -> f64 {
    let s = x.sin();
    if s.abs() < 1e-12 {
        return n as f64;
    }
    ((n as f64 * x).sin() / s).abs()
}

/// Fixed-combiner gain of a single-column panel: element gain plus the
/// equal-weight array factor.
pub fn su_combining_gain(
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    azimuth_deg: f64,
    elevation_deg: f64,
) -> Result<f64> {
    if !geometry.is_single_column() {
        return Err(Error::NotSingleColumn { rows: geometry.rows, cols: geometry.cols });
    }
    let element = geometry.element_gain_toward(pattern, azimuth_deg, elevation_deg);
    let af = geometry.equal_weight_array_factor(azimuth_deg, elevation_deg);
    Ok(element + 10.0 * af.max(1e-300).log10())
}

/// `(elevation_deg, gain_dbi)` samples of the fixed-combiner pattern at
/// boresight azimuth.
pub fn vertical_pattern(geometry: &ArrayGeometry, pattern: &ElementPattern, step_deg: f64) -> Result<Vec<(f64, f64)>> {
    let n = (180.0 / step_deg).round() as usize;
    (0..=n)
        .map(|i| {
            let el = -90.0 + i as f64 * step_deg;
            su_combining_gain(geometry, pattern, 0.0, el).map(|g| (el, g))
        })
        .collect()
}

/// Combining gain toward a user aligned with the sector bearing at a given
/// ground distance and height.
pub fn gain_vs_distance(
    geometry: &ArrayGeometry,
    pattern: &ElementPattern,
    bs_height: f64,
    user_height: f64,
    d2: f64,
) -> Result<f64> {
    let el = (user_height - bs_height).atan2(d2).to_degrees();
    su_combining_gain(geometry, pattern, 0.0, el)
}
