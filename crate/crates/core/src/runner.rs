//! Monte Carlo drop loop: users, large-scale state, association, scheduling,
//! (estimation and precoding,) SINR, rates and metrics.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::antenna::{su_combining_gain, ArrayGeometry, ElementPattern};
use crate::association::{associate, association_stats, reference_gain_dbi, Mode};
use crate::channel::{
    los_probability, path_loss, sample_shadow_field, synth_channel, synth_combined, ChannelProfile, LargeScaleState,
};
use crate::config::ScenarioConfig;
use crate::deployment::{
    build_layout, drop_users, wrap_angle_deg, wrap_displacement, NetworkLayout, Point3, UserDrop, UserKind,
};
use crate::error::Result;
use crate::link_adaptation::{select_mcs, user_rate, McsTable};
use crate::metrics::{
    write_outputs, MetricsReport, NumericalEvent, Sample, Summary, COUPLING_SERIES, RATE_SERIES, SINR_SERIES,
};
use crate::phy_mu::{
    build_pilot_plan, estimate_channels, leakage_power, schedule_mu, stream_powers, ul_tx_power, zf_precoder,
    EstimatedChannelSet, PilotPlan, PilotTransmission, PrecoderSet,
};
use crate::phy_su::{dbm_to_mw, schedule_su, sinr_su_unchecked, SuScheduleSlot};
use crate::rng::{DropSeed, Purpose};

/// Everything that stays fixed across the drops of a run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub layout: NetworkLayout,
    pub profile: ChannelProfile,
    pub geometry: ArrayGeometry,
    pub pattern: ElementPattern,
    pub mcs: McsTable,
}

impl Scenario {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Scenario {
            layout: build_layout(&cfg.deployment)?,
            profile: cfg.channel.resolve_profile()?,
            geometry: cfg.antenna.geometry(cfg.mode),
            pattern: cfg.antenna.element.clone(),
            mcs: cfg.mcs.resolve_table()?,
            cfg: cfg.clone(),
        })
    }

    fn rate(&self, sinr_db: f64, prbs: f64) -> f64 {
        user_rate(select_mcs(&self.mcs, sinr_db), prbs, self.cfg.mcs.overhead_factor)
    }

    fn n_groups(&self) -> usize {
        self.cfg.power.n_prb.div_ceil(self.cfg.channel.prb_group)
    }
}

/// Geometry and large-scale state of one BS site toward one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteLink {
    pub offset: Point3,
    pub d2: f64,
    pub d3: f64,
    pub los: bool,
    pub path_loss_db: f64,
    pub shadow_db: f64,
}

/// Users and large-scale channel state of one drop, after association.
#[derive(Debug, Clone)]
pub struct DropState {
    pub users: Vec<UserDrop>,
    /// `links[site][user]`.
    pub links: Vec<Vec<SiteLink>>,
    pub o2i_db: Vec<f64>,
    /// `rsrp_dbm[user][cell]`.
    pub rsrp_dbm: Vec<Vec<f64>>,
    /// `reference_gain_dbi[user][cell]`, the antenna gain used for RSRP.
    pub reference_gain_dbi: Vec<Vec<f64>>,
    pub sectors_per_site: usize,
    pub bearings: Vec<f64>,
}

impl DropState {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn serving(&self, user: usize) -> usize {
        self.users[user].serving_cell.expect("associated drop")
    }

    pub fn large_scale(&self, cell: usize, user: usize) -> LargeScaleState {
        let site = cell / self.sectors_per_site;
        let l = &self.links[site][user];
        let bearing = self.bearings[cell % self.sectors_per_site];
        LargeScaleState {
            los: l.los,
            path_loss_db: l.path_loss_db,
            shadow_db: l.shadow_db,
            o2i_db: self.o2i_db[user],
            azimuth_deg: wrap_angle_deg(l.offset.y.atan2(l.offset.x).to_degrees() - bearing),
            elevation_deg: l.offset.z.atan2(l.d2).to_degrees(),
        }
    }

    /// Users served by each cell, in id order.
    pub fn served_users(&self, n_cells: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n_cells];
        for (u, user) in self.users.iter().enumerate() {
            out[user.serving_cell.expect("associated drop")].push(u);
        }
        out
    }
}

/// Drops users, samples LoS states, shadowing and indoor losses, and
/// associates every user with its best cell.
pub fn sample_drop(scn: &Scenario, drop: usize) -> Result<DropState> {
    let cfg = &scn.cfg;
    let layout = &scn.layout;
    let seeds = DropSeed::new(cfg.seed, drop as u64);
    let mut users = drop_users(layout, &cfg.deployment, &mut seeds.stream(Purpose::Users, 0));
    let n_sites = layout.sites.len();
    let carrier = cfg.channel.carrier_ghz;

    let mut links: Vec<Vec<SiteLink>> = (0..n_sites)
        .map(|s| {
            let bs = layout.bs_position(s);
            users
                .iter()
                .map(|u| {
                    let d = wrap_displacement(layout, bs, u.position);
                    SiteLink { offset: d.vector, d2: d.d2, d3: d.d3, los: false, path_loss_db: 0.0, shadow_db: 0.0 }
                })
                .collect()
        })
        .collect();

    let mut sigma = vec![vec![0.0; users.len()]; n_sites];
    for (ui, u) in users.iter().enumerate() {
        let mut rng = seeds.stream(Purpose::LosState, ui as u64);
        let h = u.height();
        let class = scn.profile.class_for(h);
        for s in 0..n_sites {
            let l = &mut links[s][ui];
            l.los = rng.random::<f64>() < los_probability(&scn.profile, l.d2, h);
            l.path_loss_db = path_loss(&scn.profile, l.d3, h, scn.layout.bs_height, l.los, carrier);
            sigma[s][ui] = if l.los { class.shadow_los.eval(h) } else { class.shadow_nlos.eval(h) };
        }
    }
    if cfg.channel.shadow_enabled {
        let offsets: Vec<Vec<Point3>> = links.iter().map(|r| r.iter().map(|l| l.offset).collect()).collect();
        let shadow = sample_shadow_field(
            &offsets,
            &sigma,
            cfg.channel.shadow_corr_m,
            cfg.channel.shadow_waves,
            &mut seeds.stream(Purpose::Shadow, 0),
        );
        for (row, sh) in links.iter_mut().zip(shadow) {
            for (l, v) in row.iter_mut().zip(sh) {
                l.shadow_db = v;
            }
        }
    }
    let o2i_db: Vec<f64> = users
        .iter()
        .enumerate()
        .map(|(ui, u)| match u.kind {
            UserKind::GueIndoor => cfg.channel.o2i.sample(&mut seeds.stream(Purpose::Indoor, ui as u64)),
            _ => 0.0,
        })
        .collect();

    let mut st = DropState {
        users: Vec::new(),
        links,
        o2i_db,
        rsrp_dbm: Vec::new(),
        reference_gain_dbi: Vec::new(),
        sectors_per_site: layout.sectors_per_site,
        bearings: layout.sector_bearings.clone(),
    };
    let n_cells = layout.n_cells();
    let mut rsrp = Vec::with_capacity(users.len());
    let mut gains = Vec::with_capacity(users.len());
    for ui in 0..users.len() {
        let mut r = Vec::with_capacity(n_cells);
        let mut g = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let ls = st.large_scale(c, ui);
            let gain = reference_gain_dbi(cfg.mode, &scn.geometry, &scn.pattern, ls.azimuth_deg, ls.elevation_deg)?;
            r.push(cfg.power.bs_tx_dbm + gain - ls.attenuation_db());
            g.push(gain);
        }
        rsrp.push(r);
        gains.push(g);
    }
    associate(&mut users, &rsrp);
    st.users = users;
    st.rsrp_dbm = rsrp;
    st.reference_gain_dbi = gains;
    Ok(st)
}

fn rician_k(scn: &Scenario, ls: &LargeScaleState, h_user: f64) -> f64 {
    if ls.los {
        scn.profile.class_for(h_user).rician_k_db
    } else {
        0.0
    }
}

fn seed_index(cell: usize, user: usize, group: usize) -> u64 {
    ((cell as u64) << 40) ^ ((user as u64) << 8) ^ group as u64
}

/// `h^H w` with the unit-norm fixed combiner of `cell` toward `user`.
fn su_link(scn: &Scenario, st: &DropState, seeds: &DropSeed, cell: usize, user: usize, group: usize) -> Complex64 {
    let ls = st.large_scale(cell, user);
    if !scn.cfg.channel.small_scale_fading {
        let g = su_combining_gain(&scn.geometry, &scn.pattern, ls.azimuth_deg, ls.elevation_deg)
            .expect("validated single-column panel");
        return Complex64::new(10f64.powf((g - ls.attenuation_db()) / 20.0), 0.0);
    }
    let k = rician_k(scn, &ls, st.users[user].height());
    let mut rng = seeds.stream(Purpose::SmallScale, seed_index(cell, user, group));
    synth_combined(&scn.geometry, &scn.pattern, &ls, k, &mut rng)
}

fn push_samples(report: &mut MetricsReport, user: &UserDrop, rate: f64, sinr_db: Option<f64>, coupling_db: f64) {
    let s = |value| Sample { kind: user.kind, height_m: user.height(), value };
    report.push(RATE_SERIES, s(rate));
    if let Some(v) = sinr_db {
        report.push(SINR_SERIES, s(v));
    }
    report.push(COUPLING_SERIES, s(coupling_db));
}

fn coupling_db(scn: &Scenario, st: &DropState, user: usize) -> f64 {
    let ls = st.large_scale(st.serving(user), user);
    let g = match scn.cfg.mode {
        Mode::Su => su_combining_gain(&scn.geometry, &scn.pattern, ls.azimuth_deg, ls.elevation_deg)
            .expect("validated single-column panel"),
        Mode::Mu => scn.geometry.element_gain_toward(&scn.pattern, ls.azimuth_deg, ls.elevation_deg),
    };
    g - ls.attenuation_db()
}

/// Round-robin schedules of every cell for a drop.
pub fn su_schedules(scn: &Scenario, st: &DropState, drop: usize) -> Vec<Vec<SuScheduleSlot>> {
    let seeds = DropSeed::new(scn.cfg.seed, drop as u64);
    st.served_users(scn.layout.n_cells())
        .iter()
        .enumerate()
        .map(|(c, users)| {
            let offset = if users.is_empty() {
                0
            } else {
                seeds.stream(Purpose::Schedule, c as u64).random_range(0..users.len())
            };
            schedule_su(c, users, scn.cfg.power.n_prb, offset)
        })
        .collect()
}

/// Per-user SINR (linear) in each PRB group of a single-user drop.
pub fn su_sinr(scn: &Scenario, st: &DropState, drop: usize) -> Vec<Vec<f64>> {
    let seeds = DropSeed::new(scn.cfg.seed, drop as u64);
    let n_cells = scn.layout.n_cells();
    let served = st.served_users(n_cells);
    let active: Vec<usize> = (0..n_cells).filter(|&c| !served[c].is_empty()).collect();
    let p_b = scn.cfg.power.prb_tx_mw();
    let sigma2 = scn.cfg.power.ue_noise_mw();
    (0..st.n_users())
        .map(|u| {
            let b = st.serving(u);
            (0..scn.n_groups())
                .map(|g| {
                    let serving = su_link(scn, st, &seeds, b, u, g);
                    let interferers: Vec<Complex64> =
                        active.iter().filter(|&&c| c != b).map(|&c| su_link(scn, st, &seeds, c, u, g)).collect();
                    sinr_su_unchecked(serving, &interferers, p_b, sigma2)
                })
                .collect()
        })
        .collect()
}

fn run_su(scn: &Scenario, st: &DropState, drop: usize, report: &mut MetricsReport) {
    let schedules = su_schedules(scn, st, drop);
    let sinr = su_sinr(scn, st, drop);
    let width = scn.cfg.channel.prb_group;
    for (u, user) in st.users.iter().enumerate() {
        let sched = &schedules[st.serving(u)];
        let held: Vec<usize> = sched.iter().filter(|s| s.user == u).map(|s| s.prb).collect();
        let rate: f64 = held.iter().map(|&p| scn.rate(10.0 * sinr[u][p / width].log10(), 1.0)).sum();
        let first_group = held.first().map_or(0, |&p| p / width);
        push_samples(report, user, rate, Some(10.0 * sinr[u][first_group].log10()), coupling_db(scn, st, u));
    }
}

/// Multi-user state of one drop: schedules, pilots, uplink powers and a
/// lazily filled cache of antenna-domain channels.
pub struct MuDrop<'a> {
    scn: &'a Scenario,
    st: &'a DropState,
    seeds: DropSeed,
    pub groups: Vec<Vec<Vec<usize>>>,
    pub plan: PilotPlan,
    pub ul_power_mw: Vec<f64>,
    active: Vec<bool>,
    /// Channels indexed by `(cell * n_users + user) * n_groups + group`.
    cache: Vec<Option<Vec<Complex64>>>,
}

impl<'a> MuDrop<'a> {
    pub fn new(scn: &'a Scenario, st: &'a DropState, drop: usize) -> Result<Self> {
        let cfg = &scn.cfg;
        let seeds = DropSeed::new(cfg.seed, drop as u64);
        let n_cells = scn.layout.n_cells();
        let served = st.served_users(n_cells);
        let groups: Vec<Vec<Vec<usize>>> = served
            .iter()
            .enumerate()
            .map(|(c, users)| {
                schedule_mu(users, cfg.mu.k_max, cfg.power.n_prb, &mut seeds.stream(Purpose::Schedule, c as u64))
            })
            .collect();
        let plan = build_pilot_plan(
            cfg.mu.m_p,
            cfg.mu.k_max,
            scn.layout.sectors_per_site,
            &groups,
            &mut seeds.stream(Purpose::Pilots, 0),
        )?;
        let pc = cfg.mu.csi_mode.power_control();
        let ul_power_mw = (0..st.n_users())
            .map(|u| {
                let ls = st.large_scale(st.serving(u), u);
                let gain = scn.geometry.element_gain_toward(&scn.pattern, ls.azimuth_deg, ls.elevation_deg)
                    - ls.attenuation_db();
                dbm_to_mw(ul_tx_power(&cfg.mu.pc, pc, gain))
            })
            .collect();
        let active = served.iter().map(|s| !s.is_empty()).collect();
        let cache = vec![None; n_cells * st.n_users() * scn.n_groups()];
        Ok(MuDrop { scn, st, seeds, groups, plan, ul_power_mw, active, cache })
    }

    fn ensure(&mut self, cell: usize, user: usize, group: usize) {
        let slot = self.slot(cell, user, group);
        if self.cache[slot].is_some() {
            return;
        }
        let (scn, st) = (self.scn, self.st);
        let ls = st.large_scale(cell, user);
        let h = if scn.cfg.channel.small_scale_fading {
            let k = rician_k(scn, &ls, st.users[user].height());
            let mut rng = self.seeds.stream(Purpose::SmallScale, seed_index(cell, user, group));
            synth_channel(&scn.geometry, &scn.pattern, &ls, k, &mut rng).h
        } else {
            let amp = crate::channel::large_scale_amplitude(&scn.geometry, &scn.pattern, &ls);
            scn.geometry.steering_vector(ls.azimuth_deg, ls.elevation_deg).into_iter().map(|a| a * amp).collect()
        };
        self.cache[slot] = Some(h);
    }

    fn slot(&self, cell: usize, user: usize, group: usize) -> usize {
        (cell * self.st.n_users() + user) * self.scn.n_groups() + group
    }

    fn h(&self, cell: usize, user: usize, group: usize) -> &[Complex64] {
        self.cache[self.slot(cell, user, group)].as_deref().expect("channel synthesized before use")
    }

    /// Estimates and zero-forcing precoders of every active cell on one PRB.
    pub fn precode(&mut self, prb: usize) -> Result<Vec<Option<(EstimatedChannelSet, PrecoderSet)>>> {
        let scn = self.scn;
        let g = prb / scn.cfg.channel.prb_group;
        let n_cells = scn.layout.n_cells();
        let sps = scn.layout.sectors_per_site;
        let mode = scn.cfg.mu.csi_mode.csi_mode();
        let contaminated = mode == crate::phy_mu::CsiMode::LsContaminated;
        let mut out = Vec::with_capacity(n_cells);
        for b in 0..n_cells {
            if !self.active[b] {
                out.push(None);
                continue;
            }
            let own = self.plan.assignment[b][prb].clone();
            let mut co: Vec<(usize, usize)> = Vec::new();
            if contaminated {
                for j in (b % sps..n_cells).step_by(sps) {
                    if j == b {
                        continue;
                    }
                    co.extend(
                        self.plan.assignment[j][prb].iter().filter(|(_, p)| own.iter().any(|(_, q)| q == p)).copied(),
                    );
                }
            }
            for &(u, _) in own.iter().chain(&co) {
                self.ensure(b, u, g);
            }
            let tx = |&(u, p): &(usize, usize)| PilotTransmission {
                user: u,
                pilot: Some(p),
                power_mw: self.ul_power_mw[u],
                h: self.h(b, u, g),
            };
            let targets: Vec<PilotTransmission> = own.iter().map(tx).collect();
            let others: Vec<PilotTransmission> = co.iter().map(tx).collect();
            let mut rng = self.seeds.stream(Purpose::SrsNoise, ((b as u64) << 16) ^ prb as u64);
            let est = estimate_channels(&targets, &others, scn.cfg.power.bs_noise_mw(), mode, &mut rng)?;
            let prec = zf_precoder(&est, scn.cfg.power.prb_tx_mw())?;
            out.push(Some((est, prec)));
        }
        Ok(out)
    }
}

/// Runs the multi-user estimation and precoding of one drop and hands every
/// `(prb, cell, estimates, precoders)` to `visit`.
pub fn inspect_mu_precoders(
    scn: &Scenario,
    drop: usize,
    mut visit: impl FnMut(usize, usize, &EstimatedChannelSet, &PrecoderSet),
) -> Result<()> {
    let st = sample_drop(scn, drop)?;
    let mut mu = MuDrop::new(scn, &st, drop)?;
    for p in 0..scn.cfg.power.n_prb {
        for (c, x) in mu.precode(p)?.iter().enumerate() {
            if let Some((e, w)) = x {
                visit(p, c, e, w);
            }
        }
    }
    Ok(())
}

fn run_mu(scn: &Scenario, st: &DropState, drop: usize, report: &mut MetricsReport) -> Result<()> {
    let cfg = &scn.cfg;
    let n_cells = scn.layout.n_cells();
    let n_users = st.n_users();
    let mut mu = MuDrop::new(scn, st, drop)?;
    let p_b = cfg.power.prb_tx_mw();
    let sigma2 = cfg.power.ue_noise_mw();

    // Per-port large-scale power of every link; weak links use it as their mean interference.
    let mut exact: Vec<Vec<usize>> = vec![Vec::new(); n_users];
    let mut approx = vec![0.0; n_users];
    for u in 0..n_users {
        let b = st.serving(u);
        let lin: Vec<f64> = (0..n_cells)
            .map(|c| {
                let ls = st.large_scale(c, u);
                let g = scn.geometry.element_gain_toward(&scn.pattern, ls.azimuth_deg, ls.elevation_deg);
                g - ls.attenuation_db()
            })
            .collect();
        let best = lin.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (c, &g) in lin.iter().enumerate() {
            if c == b || !mu.active[c] {
                continue;
            }
            if g >= best - cfg.mu.exact_margin_db {
                exact[u].push(c);
            } else {
                approx[u] += p_b * 10f64.powf(g / 10.0);
            }
        }
    }

    let mut rate = vec![0.0; n_users];
    let mut first_sinr: Vec<Option<f64>> = vec![None; n_users];
    let width = cfg.channel.prb_group;
    for p in 0..cfg.power.n_prb {
        let g = p / width;
        let prec = mu.precode(p)?;
        for (b, x) in prec.iter().enumerate() {
            let Some((_, ps)) = x else { continue };
            for &u in &ps.dropped {
                report.events.push(NumericalEvent {
                    drop,
                    prb: p,
                    cell: b,
                    dropped_user: st.users[u].user_id,
                    condition_number: ps.condition_number,
                });
            }
            for &u in &ps.users {
                mu.ensure(b, u, g);
                for &j in &exact[u] {
                    mu.ensure(j, u, g);
                }
            }
        }
        for (b, x) in prec.iter().enumerate() {
            let Some((_, ps)) = x else { continue };
            for (k, &u) in ps.users.iter().enumerate() {
                let powers = stream_powers(&ps.w, mu.h(b, u, g));
                let signal = powers[k];
                let intra: f64 = powers.iter().sum::<f64>() - signal;
                let mut inter = approx[u];
                for &j in &exact[u] {
                    if let Some((_, pj)) = &prec[j] {
                        inter += leakage_power(&pj.w, mu.h(j, u, g));
                    }
                }
                let sinr_db = 10.0 * (signal / (intra.max(0.0) + inter + sigma2)).log10();
                rate[u] += scn.rate(sinr_db, 1.0);
                if first_sinr[u].is_none() {
                    first_sinr[u] = Some(sinr_db);
                }
            }
        }
    }
    for (u, user) in st.users.iter().enumerate() {
        push_samples(report, user, rate[u], first_sinr[u], coupling_db(scn, st, u));
    }
    Ok(())
}

/// Simulates one drop into a partial report.
pub fn run_drop(scn: &Scenario, drop: usize) -> Result<MetricsReport> {
    let st = sample_drop(scn, drop)?;
    let mut report = MetricsReport::default();
    let gains: Vec<f64> = (0..st.n_users()).map(|u| st.reference_gain_dbi[u][st.serving(u)]).collect();
    report.association = association_stats(&scn.layout, &st.users, &gains);
    match scn.cfg.mode {
        Mode::Su => run_su(scn, &st, drop, &mut report),
        Mode::Mu => run_mu(scn, &st, drop, &mut report)?,
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Drops run on the rayon pool; falls back to serial without the
    /// `parallel` feature.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub drops: usize,
    pub metrics: MetricsReport,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Writes the metric CSVs and `summary.json` (with the config echo).
    pub fn write(&self, dir: &Path) -> Result<Summary> {
        let extra = serde_json::json!({
            "seed": self.seed,
            "drops": self.drops,
            "config": serde_json::to_value(&self.config)?,
        });
        write_outputs(&self.metrics, &self.config.metrics, extra, dir)
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    run_scenario_with(cfg, Execution::Parallel)
}

pub fn run_scenario_with(cfg: &ScenarioConfig, exec: Execution) -> Result<RunReport> {
    let scn = Scenario::new(cfg)?;
    let parts: Vec<MetricsReport> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.drops).into_par_iter().map(|d| run_drop(&scn, d)).collect::<Result<_>>()?
        }
        _ => (0..cfg.drops).map(|d| run_drop(&scn, d)).collect::<Result<_>>()?,
    };
    let mut metrics = MetricsReport::default();
    for p in parts {
        metrics.merge(p);
    }
    Ok(RunReport { config: cfg.clone(), seed: cfg.seed, drops: cfg.drops, metrics })
}

/// Association-only pass over `drops` drops (no scheduling or SINR).
pub fn association_records(cfg: &ScenarioConfig) -> Result<Vec<crate::association::AssociationRecord>> {
    let scn = Scenario::new(cfg)?;
    let mut out = Vec::new();
    for d in 0..cfg.drops {
        let st = sample_drop(&scn, d)?;
        let gains: Vec<f64> = (0..st.n_users()).map(|u| st.reference_gain_dbi[u][st.serving(u)]).collect();
        out.extend(association_stats(&scn.layout, &st.users, &gains));
    }
    Ok(out)
}
