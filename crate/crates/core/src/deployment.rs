//! Hexagonal site layout with wrap-around and per-sector user drops.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of hexagonal tiers (331 sites).
pub const MAX_TIERS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn norm2d(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

impl std::ops::Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

/// 3GPP UAV density scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Case3,
    Case4,
    Case5,
}

impl Case {
    /// UAVs per sector for the nominal 15 users per sector.
    pub fn uavs_per_15(&self) -> usize {
        match self {
            Case::Case3 => 1,
            Case::Case4 => 3,
            Case::Case5 => 5,
        }
    }

    /// `(uavs, gues)` per sector for a given sector population.
    pub fn split(&self, users_per_sector: usize) -> (usize, usize) {
        let uavs = (users_per_sector * self.uavs_per_15() + 7) / 15;
        let uavs = uavs.min(users_per_sector);
        (uavs, users_per_sector - uavs)
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "3" | "case3" => Ok(Case::Case3),
            "4" | "case4" => Ok(Case::Case4),
            "5" | "case5" => Ok(Case::Case5),
            other => Err(Error::UnknownCase(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeploymentConfig {
    pub tiers: u32,
    pub isd_m: f64,
    pub bs_height_m: f64,
    pub users_per_sector: usize,
    pub case: Case,
    pub uav_fixed_height_m: Option<f64>,
    pub min_distance_m: f64,
    pub indoor_fraction: f64,
    pub min_floors: u32,
    pub max_floors: u32,
    pub uav_min_height_m: f64,
    pub uav_max_height_m: f64,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        DeploymentConfig {
            tiers: 2,
            isd_m: 500.0,
            bs_height_m: 25.0,
            users_per_sector: 15,
            case: Case::Case3,
            uav_fixed_height_m: None,
            min_distance_m: 35.0,
            indoor_fraction: 0.8,
            min_floors: 4,
            max_floors: 8,
            uav_min_height_m: 1.5,
            uav_max_height_m: 300.0,
        }
    }
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("deployment: {m}")));
        if !(self.isd_m > 0.0 && self.isd_m.is_finite()) {
            return bad("isd_m must be positive");
        }
        if self.tiers > MAX_TIERS {
            return bad(&format!("tiers must be at most {MAX_TIERS}"));
        }
        if !(self.bs_height_m > 0.0) {
            return bad("bs_height_m must be positive");
        }
        if self.users_per_sector == 0 {
            return bad("users_per_sector must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.indoor_fraction) {
            return bad("indoor_fraction must lie in [0, 1]");
        }
        if self.min_floors == 0 || self.min_floors > self.max_floors {
            return bad("floor range must satisfy 1 <= min_floors <= max_floors");
        }
        if !(self.min_distance_m >= 0.0 && self.min_distance_m < self.isd_m / 2.0) {
            return bad("min_distance_m must lie in [0, isd_m/2)");
        }
        if !(self.uav_min_height_m >= 1.5 && self.uav_min_height_m <= self.uav_max_height_m) {
            return bad("UAV height range must satisfy 1.5 <= min <= max");
        }
        if let Some(h) = self.uav_fixed_height_m {
            if !(1.5..=300.0).contains(&h) {
                return bad("uav_fixed_height_m must lie in [1.5, 300]");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub sites: Vec<Site>,
    pub sectors_per_site: usize,
    pub inter_site_distance: f64,
    pub bs_height: f64,
    pub sector_bearings: Vec<f64>,
    /// Zero vector first, then the six supercell shifts.
    pub wrap_vectors: Vec<(f64, f64)>,
}

/// Cell index = `3 * site + sector`.
pub type CellId = usize;

impl NetworkLayout {
    pub fn n_cells(&self) -> usize {
        self.sites.len() * self.sectors_per_site
    }

    pub fn site_of(&self, cell: CellId) -> usize {
        cell / self.sectors_per_site
    }

    pub fn sector_of(&self, cell: CellId) -> usize {
        cell % self.sectors_per_site
    }

    pub fn cell_id(&self, site: usize, sector: usize) -> CellId {
        site * self.sectors_per_site + sector
    }

    pub fn bs_position(&self, site: usize) -> Point3 {
        let s = &self.sites[site];
        Point3::new(s.x, s.y, self.bs_height)
    }

    pub fn bearing_deg(&self, cell: CellId) -> f64 {
        self.sector_bearings[self.sector_of(cell)]
    }

    /// Whether a horizontal offset from a site center lies in that site's hexagon.
    pub fn in_site_hexagon(&self, dx: f64, dy: f64) -> bool {
        // Neighbours sit at 30 + 60k degrees, so the edges have those normals.
        let half = self.inter_site_distance / 2.0 + 1e-9;
        (0..6).all(|k| {
            let a = (30.0 + 60.0 * k as f64).to_radians();
            dx * a.cos() + dy * a.sin() <= half
        })
    }
}

fn axial_to_xy(q: i64, r: i64, isd: f64) -> (f64, f64) {
    let (s, c) = (PI / 6.0).sin_cos();
    (isd * (q as f64 * c), isd * (q as f64 * s + r as f64))
}

fn hex_distance(q: i64, r: i64) -> i64 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

pub fn build_layout(cfg: &DeploymentConfig) -> Result<NetworkLayout> {
    if !(cfg.isd_m > 0.0 && cfg.isd_m.is_finite()) {
        return Err(Error::Config("deployment: isd_m must be positive".into()));
    }
    if cfg.tiers > MAX_TIERS {
        return Err(Error::Config(format!("deployment: tiers must be at most {MAX_TIERS}")));
    }
    let t = cfg.tiers as i64;
    let mut axial = Vec::new();
    for q in -t..=t {
        for r in -t..=t {
            if hex_distance(q, r) <= t {
                axial.push((q, r));
            }
        }
    }
    // Ring by ring, counter-clockwise from the +x axis.
    axial.sort_by(|a, b| {
        let (xa, ya) = axial_to_xy(a.0, a.1, 1.0);
        let (xb, yb) = axial_to_xy(b.0, b.1, 1.0);
        let ang = |x: f64, y: f64| {
            let v = y.atan2(x);
            if v < -1e-12 {
                v + 2.0 * PI
            } else {
                v.max(0.0)
            }
        };
        hex_distance(a.0, a.1).cmp(&hex_distance(b.0, b.1)).then(ang(xa, ya).total_cmp(&ang(xb, yb)))
    });
    let sites = axial
        .iter()
        .enumerate()
        .map(|(id, &(q, r))| {
            let (x, y) = axial_to_xy(q, r, cfg.isd_m);
            Site { id, x, y }
        })
        .collect();

    let shifts = [(2 * t + 1, -t), (t, t + 1), (-t - 1, 2 * t + 1)];
    let mut wrap_vectors = vec![(0.0, 0.0)];
    for &(q, r) in &shifts {
        wrap_vectors.push(axial_to_xy(q, r, cfg.isd_m));
    }
    for &(q, r) in &shifts {
        wrap_vectors.push(axial_to_xy(-q, -r, cfg.isd_m));
    }

    Ok(NetworkLayout {
        sites,
        sectors_per_site: 3,
        inter_site_distance: cfg.isd_m,
        bs_height: cfg.bs_height_m,
        sector_bearings: vec![0.0, 120.0, 240.0],
        wrap_vectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub vector: Point3,
    pub d3: f64,
    pub d2: f64,
}

/// Shortest displacement from `a` to any wrap image of `b`.
pub fn wrap_displacement(layout: &NetworkLayout, a: Point3, b: Point3) -> Displacement {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &(wx, wy) in &layout.wrap_vectors {
        let dx = b.x + wx - a.x;
        let dy = b.y + wy - a.y;
        let d2 = dx * dx + dy * dy;
        if d2 < best.0 {
            best = (d2, dx, dy);
        }
    }
    let vector = Point3::new(best.1, best.2, b.z - a.z);
    Displacement { vector, d3: vector.norm(), d2: best.0.sqrt() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserKind {
    GueOutdoor,
    GueIndoor,
    Uav,
}

impl UserKind {
    pub fn is_uav(&self) -> bool {
        matches!(self, UserKind::Uav)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            UserKind::GueOutdoor => "gue_outdoor",
            UserKind::GueIndoor => "gue_indoor",
            UserKind::Uav => "uav",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDrop {
    pub user_id: usize,
    pub kind: UserKind,
    pub position: Point3,
    pub floor: Option<u32>,
    /// Sector the user was dropped in; association may pick another cell.
    pub drop_cell: CellId,
    pub serving_cell: Option<CellId>,
}

impl UserDrop {
    pub fn height(&self) -> f64 {
        self.position.z
    }
}

/// Uniform point in the given sector of a site, at least `min_d` from the mast.
fn sample_in_sector<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    site: usize,
    sector: usize,
    min_d: f64,
    rng: &mut R,
) -> (f64, f64) {
    let radius = layout.inter_site_distance / 3f64.sqrt();
    let bearing = layout.sector_bearings[sector];
    let half_width = 180.0 / layout.sectors_per_site as f64;
    loop {
        let dx = rng.random_range(-radius..radius);
        let dy = rng.random_range(-radius..radius);
        if dx.hypot(dy) < min_d || !layout.in_site_hexagon(dx, dy) {
            continue;
        }
        if wrap_angle_deg(dy.atan2(dx).to_degrees() - bearing).abs() > half_width {
            continue;
        }
        let s = &layout.sites[site];
        return (s.x + dx, s.y + dy);
    }
}

/// Maps an angle in degrees to (-180, 180].
pub fn wrap_angle_deg(a: f64) -> f64 {
    let mut v = a % 360.0;
    if v <= -180.0 {
        v += 360.0;
    } else if v > 180.0 {
        v -= 360.0;
    }
    v
}

pub fn drop_users<R: Rng + ?Sized>(layout: &NetworkLayout, cfg: &DeploymentConfig, rng: &mut R) -> Vec<UserDrop> {
    let (n_uav, n_gue) = cfg.case.split(cfg.users_per_sector);
    let mut users = Vec::with_capacity(layout.n_cells() * cfg.users_per_sector);
    for site in 0..layout.sites.len() {
        for sector in 0..layout.sectors_per_site {
            let cell = layout.cell_id(site, sector);
            for slot in 0..n_uav + n_gue {
                let (x, y) = sample_in_sector(layout, site, sector, cfg.min_distance_m, rng);
                let (kind, z, floor) = if slot < n_uav {
                    let h = match cfg.uav_fixed_height_m {
                        Some(h) => h,
                        None => rng.random_range(cfg.uav_min_height_m..=cfg.uav_max_height_m),
                    };
                    (UserKind::Uav, h, None)
                } else if rng.random::<f64>() < cfg.indoor_fraction {
                    let floors = rng.random_range(cfg.min_floors..=cfg.max_floors);
                    let floor = rng.random_range(1..=floors);
                    (UserKind::GueIndoor, 3.0 * (floor - 1) as f64 + 1.5, Some(floor))
                } else {
                    (UserKind::GueOutdoor, 1.5, None)
                };
                users.push(UserDrop {
                    user_id: users.len(),
                    kind,
                    position: Point3::new(x, y, z),
                    floor,
                    drop_cell: cell,
                    serving_cell: None,
                });
            }
        }
    }
    users
}
