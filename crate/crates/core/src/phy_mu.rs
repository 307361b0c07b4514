//! Multi-user massive MIMO downlink: pilot reuse, uplink power control,
//! least-squares estimation with pilot contamination and zero-forcing.
//!
//! Precoders carry the transmit power (`sum_k ||w_k||^2 = P_b`), so received
//! powers are plain `|h^H w|^2` terms.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::complex_normal;
use crate::error::{Error, Result};

pub const DEFAULT_PILOT_LENGTH: usize = 24;
pub const DEFAULT_K_MAX: usize = 8;

/// Gram matrices with a larger eigenvalue spread are treated as rank deficient.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Orthonormal DFT sequences `v_i[n] = exp(-j 2 pi i n / M) / sqrt(M)`.
pub fn dft_codebook(m_p: usize) -> Vec<Vec<Complex64>> {
    let s = 1.0 / (m_p as f64).sqrt();
    (0..m_p)
        .map(|i| {
            (0..m_p)
                .map(|n| {
                    let k = (i * n) % m_p;
                    Complex64::from_polar(s, -std::f64::consts::TAU * k as f64 / m_p as f64)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotPlan {
    pub m_p: usize,
    pub k_max: usize,
    pub sectors_per_site: usize,
    pub codebook: Vec<Vec<Complex64>>,
    /// `assignment[cell][prb]` lists `(user, pilot)` for the users scheduled there.
    pub assignment: Vec<Vec<Vec<(usize, usize)>>>,
}

impl PilotPlan {
    /// Pilot indices reserved for a sector index; every site reuses the same pools.
    pub fn pool(&self, sector: usize) -> Range<usize> {
        sector * self.k_max..(sector + 1) * self.k_max
    }

    pub fn pilot_of(&self, cell: usize, prb: usize, user: usize) -> Option<usize> {
        self.assignment.get(cell)?.get(prb)?.iter().find(|&&(u, _)| u == user).map(|&(_, p)| p)
    }

    /// Largest entry of `|V^H V - I|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.codebook.iter().enumerate() {
            for (j, b) in self.codebook.iter().enumerate() {
                let g: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Draws pilots for every `(cell, prb)` group without replacement from the
/// cell's sector pool. `groups[cell][prb]` lists the users scheduled there.
pub fn build_pilot_plan<R: Rng + ?Sized>(
    m_p: usize,
    k_max: usize,
    sectors_per_site: usize,
    groups: &[Vec<Vec<usize>>],
    rng: &mut R,
) -> Result<PilotPlan> {
    if k_max == 0 || m_p < sectors_per_site * k_max {
        return Err(Error::PilotsTooShort { m_p, k_max });
    }
    let mut pool: Vec<usize> = (0..k_max).collect();
    let assignment = groups
        .iter()
        .enumerate()
        .map(|(cell, prbs)| {
            let base = (cell % sectors_per_site) * k_max;
            prbs.iter()
                .map(|users| {
                    if users.len() > k_max {
                        return Err(Error::PilotsTooShort { m_p, k_max: users.len() });
                    }
                    pool.shuffle(rng);
                    Ok(users.iter().zip(&pool).map(|(&u, &p)| (u, base + p)).collect())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PilotPlan { m_p, k_max, sectors_per_site, codebook: dft_codebook(m_p), assignment })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UplinkPowerParams {
    pub p0_dbm: f64,
    pub alpha: f64,
    pub pmax_dbm: f64,
}

impl Default for UplinkPowerParams {
    fn default() -> Self {
        UplinkPowerParams { p0_dbm: -58.0, alpha: 0.5, pmax_dbm: 23.0 }
    }
}

impl UplinkPowerParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config("mu.pc: alpha must lie in [0, 1]".into()));
        }
        if !(self.pmax_dbm >= self.p0_dbm) {
            return Err(Error::Config("mu.pc: pmax_dbm must not be below p0_dbm".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerControl {
    Fractional,
    EqualPower,
}

/// Pilot transmit power in dBm for a user whose average channel gain toward
/// its serving cell is `path_gain_db` (negative).
pub fn ul_tx_power(params: &UplinkPowerParams, mode: PowerControl, path_gain_db: f64) -> f64 {
    match mode {
        PowerControl::EqualPower => params.pmax_dbm,
        PowerControl::Fractional => params.pmax_dbm.min(params.p0_dbm + params.alpha * -path_gain_db),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiMode {
    Perfect,
    LsContaminated,
}

/// One user's pilot as seen by the estimating BS.
#[derive(Debug, Clone, Copy)]
pub struct PilotTransmission<'a> {
    pub user: usize,
    pub pilot: Option<usize>,
    pub power_mw: f64,
    /// Channel from the estimating BS to this user.
    pub h: &'a [Complex64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedChannelSet {
    pub users: Vec<usize>,
    /// One column per user in `users`.
    pub h_hat: DMatrix<Complex64>,
    pub mode: CsiMode,
}

/// Least-squares estimates of the `targets` channels. Pilots are orthonormal,
/// so after despreading only users sharing the target's pilot index leak into
/// its estimate, scaled by their amplitude ratio; the noise term has
/// per-component variance `sigma2_mw / P_k`.
pub fn estimate_channels<R: Rng + ?Sized>(
    targets: &[PilotTransmission],
    others: &[PilotTransmission],
    sigma2_mw: f64,
    mode: CsiMode,
    rng: &mut R,
) -> Result<EstimatedChannelSet> {
    let n = targets.first().map_or(0, |t| t.h.len());
    let mut h_hat = DMatrix::zeros(n, targets.len());
    for (col, t) in targets.iter().enumerate() {
        let pilot = t.pilot.ok_or(Error::MissingPilot { user: t.user })?;
        let mut column = h_hat.column_mut(col);
        let est = column.as_mut_slice();
        est.copy_from_slice(t.h);
        if mode == CsiMode::LsContaminated {
            for o in others {
                let op = o.pilot.ok_or(Error::MissingPilot { user: o.user })?;
                if op != pilot {
                    continue;
                }
                let r = (o.power_mw / t.power_mw).sqrt();
                for (e, h) in est.iter_mut().zip(o.h) {
                    *e += h * r;
                }
            }
            if sigma2_mw > 0.0 {
                let s = (sigma2_mw / t.power_mw).sqrt();
                for e in est.iter_mut() {
                    *e += complex_normal(rng) * s;
                }
            }
        }
    }
    Ok(EstimatedChannelSet { users: targets.iter().map(|t| t.user).collect(), h_hat, mode })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    /// Users actually served, one column of `w` each.
    pub users: Vec<usize>,
    pub w: DMatrix<Complex64>,
    /// Users removed because the estimate matrix was rank deficient.
    pub dropped: Vec<usize>,
    /// Eigenvalue spread of the Gram matrix that was finally inverted; when
    /// no user was dropped, the Frobenius upper bound on it.
    pub condition_number: f64,
}

impl PrecoderSet {
    pub fn empty(n_antennas: usize) -> Self {
        PrecoderSet { users: Vec::new(), w: DMatrix::zeros(n_antennas, 0), dropped: Vec::new(), condition_number: 1.0 }
    }

    pub fn total_power(&self) -> f64 {
        self.w.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// `sum conj(a_i) b_i`.
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = ([0.0f64; 2], [0.0f64; 2]);
    let mut pairs = a.chunks_exact(2).zip(b.chunks_exact(2));
    for (x, y) in &mut pairs {
        for l in 0..2 {
            re[l] += x[l].re * y[l].re + x[l].im * y[l].im;
            im[l] += x[l].re * y[l].im - x[l].im * y[l].re;
        }
    }
    let mut acc = Complex64::new(re[0] + re[1], im[0] + im[1]);
    if a.len() % 2 == 1 {
        acc += a[a.len() - 1].conj() * b[a.len() - 1];
    }
    acc
}

/// `y += s x`.
fn axpy(y: &mut [Complex64], x: &[Complex64], s: Complex64) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += x * s;
    }
}

/// Thin QR by classical Gram-Schmidt with one reorthogonalization pass.
/// Returns `Q` (n x k, column-major) and the upper-triangular `R`.
fn thin_qr(h: &DMatrix<Complex64>) -> (Vec<Complex64>, DMatrix<Complex64>) {
    let (n, k) = h.shape();
    let mut q = h.as_slice().to_vec();
    let mut r = DMatrix::zeros(k, k);
    let mut proj = vec![Complex64::new(0.0, 0.0); k];
    for j in 0..k {
        let (done, rest) = q.split_at_mut(j * n);
        let v = &mut rest[..n];
        let before = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let mut after = before;
        // A second pass only when cancellation shrank the column noticeably.
        for pass in 0..2 {
            if pass == 1 && after > 0.5 * before {
                break;
            }
            for (i, qi) in done.chunks_exact(n).enumerate() {
                proj[i] = dot_conj(qi, v);
            }
            for (i, qi) in done.chunks_exact(n).enumerate() {
                axpy(v, qi, -proj[i]);
                r[(i, j)] += proj[i];
            }
            after = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
        let norm = after.sqrt();
        r[(j, j)] = Complex64::new(norm, 0.0);
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    }
    (q, r)
}

/// Eigenvalue spread of `H^H H = R^H R`.
fn gram_condition(r: &DMatrix<Complex64>) -> f64 {
    let eig = r.ad_mul(r).symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `R^{-1}` and `(||R||_F ||R^{-1}||_F)^2`, an upper bound on the Gram eigenvalue spread.
fn inverse_with_bound(r: &DMatrix<Complex64>) -> Option<(DMatrix<Complex64>, f64)> {
    let k = r.nrows();
    if (0..k).any(|i| r[(i, i)].norm() == 0.0) {
        return None;
    }
    let inv = r.solve_upper_triangular(&DMatrix::identity(k, k))?;
    let bound = r.norm_squared() * inv.norm_squared();
    bound.is_finite().then_some((inv, bound))
}

/// Zero-forcing `W = H (H^H H)^{-1} D^{-1/2}`, each column carrying
/// `P_b / K_b`. Columns are dropped, weakest first, until the Gram matrix
/// is well conditioned.
pub fn zf_precoder(est: &EstimatedChannelSet, p_b_mw: f64) -> Result<PrecoderSet> {
    let n = est.h_hat.nrows();
    let mut users = est.users.clone();
    let mut h = est.h_hat.clone();
    let mut dropped = Vec::new();
    let mut factors = None;
    while !users.is_empty() {
        let (q, r) = thin_qr(&h);
        if let Some((r_inv, bound)) = inverse_with_bound(&r) {
            // The exact spread is only needed when the cheap bound is inconclusive
            // or a drop event will report it.
            let cond = if bound <= MAX_GRAM_CONDITION && dropped.is_empty() { bound } else { gram_condition(&r) };
            if cond <= MAX_GRAM_CONDITION {
                factors = Some((q, r_inv, cond));
                break;
            }
        }
        let weakest = (0..users.len())
            .min_by(|&a, &b| h.column(a).norm_squared().total_cmp(&h.column(b).norm_squared()))
            .expect("non-empty");
        dropped.push(users.remove(weakest));
        h = h.remove_column(weakest);
    }
    let Some((q, r_inv, cond)) = factors else {
        return Ok(PrecoderSet { dropped, ..PrecoderSet::empty(n) });
    };
    // H = QR gives the pseudo-inverse transpose Q R^{-H} without forming the Gram inverse.
    let k = users.len();
    let mut w = DMatrix::zeros(n, k);
    for j in 0..k {
        let mut col = w.column_mut(j);
        let out = col.as_mut_slice();
        for i in j..k {
            axpy(out, &q[i * n..(i + 1) * n], r_inv[(j, i)].conj());
        }
    }
    let per_user = (p_b_mw / k as f64).sqrt();
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        col *= Complex64::new(per_user / norm, 0.0);
    }
    Ok(PrecoderSet { users, w, dropped, condition_number: cond })
}

/// `|h^H w_i|^2` for every column of `w`.
pub fn stream_powers(w: &DMatrix<Complex64>, h: &[Complex64]) -> Vec<f64> {
    w.column_iter().map(|col| col.iter().zip(h).map(|(w, h)| h.conj() * w).sum::<Complex64>().norm_sqr()).collect()
}

/// Total power `||W^H h||^2` a precoder set radiates toward a channel.
pub fn leakage_power(w: &DMatrix<Complex64>, h: &[Complex64]) -> f64 {
    stream_powers(w, h).iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSinrTerms {
    pub signal: f64,
    pub intra: f64,
    pub inter: f64,
    pub noise: f64,
}

impl MuSinrTerms {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.intra + self.inter + self.noise)
    }
}

/// Breakdown of the target's SINR on one PRB. `h_serving` is the channel from
/// the serving BS; each interferer pairs a cell's precoders with the channel
/// from that cell to the target.
pub fn sinr_mu_terms(
    target: usize,
    prb: usize,
    serving: &PrecoderSet,
    h_serving: &[Complex64],
    interferers: &[(&PrecoderSet, &[Complex64])],
    sigma2_mw: f64,
) -> Result<MuSinrTerms> {
    let k = serving.users.iter().position(|&u| u == target).ok_or(Error::NotScheduled { user: target, prb })?;
    let p = stream_powers(&serving.w, h_serving);
    let signal = p[k];
    let intra = p.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| v).sum();
    let inter = interferers.iter().map(|(ps, h)| leakage_power(&ps.w, h)).sum();
    Ok(MuSinrTerms { signal, intra, inter, noise: sigma2_mw })
}

pub fn sinr_mu(
    target: usize,
    prb: usize,
    serving: &PrecoderSet,
    h_serving: &[Complex64],
    interferers: &[(&PrecoderSet, &[Complex64])],
    sigma2_mw: f64,
) -> Result<f64> {
    sinr_mu_terms(target, prb, serving, h_serving, interferers, sigma2_mw).map(|t| t.sinr())
}

/// Round-robin groups: after a random permutation, PRB `p` serves the
/// `min(K, k_max)` users starting at position `p * k_max` (mod K).
pub fn schedule_mu<R: Rng + ?Sized>(users: &[usize], k_max: usize, n_prb: usize, rng: &mut R) -> Vec<Vec<usize>> {
    if users.is_empty() {
        return vec![Vec::new(); n_prb];
    }
    let mut perm = users.to_vec();
    perm.shuffle(rng);
    let k = perm.len();
    let per = k.min(k_max);
    (0..n_prb).map(|p| (0..per).map(|i| perm[(p * k_max + i) % k]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    fn random_vec(n: usize, scale: f64, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..n).map(|_| complex_normal(rng) * scale).collect()
    }

    fn est(cols: &[Vec<Complex64>]) -> EstimatedChannelSet {
        let n = cols[0].len();
        let h = DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r]);
        EstimatedChannelSet { users: (0..cols.len()).collect(), h_hat: h, mode: CsiMode::Perfect }
    }

    #[test]
    fn codebook_is_orthonormal() {
        let plan = build_pilot_plan(24, 8, 3, &[], &mut seeded(0)).unwrap();
        assert!(plan.gram_deviation() < 1e-12);
    }

    #[test]
    fn reuse_three_pools() {
        let groups: Vec<Vec<Vec<usize>>> = (0..9).map(|c| vec![(0..8).map(|u| c * 100 + u).collect(); 4]).collect();
        let plan = build_pilot_plan(24, 8, 3, &groups, &mut seeded(1)).unwrap();
        assert_eq!(plan.pool(0), 0..8);
        assert_eq!(plan.pool(1), 8..16);
        assert_eq!(plan.pool(2), 16..24);
        for cell in 0..9 {
            for prb in 0..4 {
                let pilots: Vec<usize> = plan.assignment[cell][prb].iter().map(|&(_, p)| p).collect();
                let mut uniq = pilots.clone();
                uniq.sort_unstable();
                uniq.dedup();
                assert_eq!(uniq.len(), pilots.len());
                assert!(pilots.iter().all(|p| plan.pool(cell % 3).contains(p)));
            }
        }
        // Full cells use the whole pool, so co-sectors at other sites share every pilot.
        let set = |c: usize| {
            let mut v: Vec<usize> = plan.assignment[c][0].iter().map(|&(_, p)| p).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(set(0), set(3));
        assert!(set(0).iter().all(|p| !set(1).contains(p) && !set(2).contains(p)));
    }

    #[test]
    fn short_pilots_are_rejected() {
        assert!(matches!(build_pilot_plan(23, 8, 3, &[], &mut seeded(0)), Err(Error::PilotsTooShort { .. })));
        let groups = vec![vec![(0..9).collect::<Vec<_>>()]];
        assert!(build_pilot_plan(24, 8, 3, &groups, &mut seeded(0)).is_err());
    }

    #[test]
    fn power_control_examples() {
        let p = UplinkPowerParams::default();
        assert!((ul_tx_power(&p, PowerControl::Fractional, -100.0) - -8.0).abs() < 1e-12);
        assert!((ul_tx_power(&p, PowerControl::Fractional, -170.0) - 23.0).abs() < 1e-12);
        let a0 = UplinkPowerParams { alpha: 0.0, ..p };
        assert_eq!(ul_tx_power(&a0, PowerControl::Fractional, -137.0), -58.0);
        assert_eq!(ul_tx_power(&p, PowerControl::EqualPower, -60.0), 23.0);
    }

    #[test]
    fn clean_estimate_is_exact() {
        let mut rng = seeded(2);
        let h = random_vec(16, 1e-5, &mut rng);
        let t = [PilotTransmission { user: 0, pilot: Some(3), power_mw: 0.1, h: &h }];
        let e = estimate_channels(&t, &[], 0.0, CsiMode::LsContaminated, &mut rng).unwrap();
        for (a, b) in e.h_hat.column(0).iter().zip(&h) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_co_pilot_leaks_with_amplitude_ratio() {
        let mut rng = seeded(3);
        let h = random_vec(128, 1e-5, &mut rng);
        let hj = random_vec(128, 3e-6, &mut rng);
        let (pk, pj) = (0.05, 199.5);
        let t = [PilotTransmission { user: 0, pilot: Some(5), power_mw: pk, h: &h }];
        let o = [
            PilotTransmission { user: 1, pilot: Some(5), power_mw: pj, h: &hj },
            PilotTransmission { user: 2, pilot: Some(6), power_mw: 1e6, h: &hj },
        ];
        let e = estimate_channels(&t, &o, 0.0, CsiMode::LsContaminated, &mut rng).unwrap();
        let r = (pj / pk).sqrt();
        for ((a, b), c) in e.h_hat.column(0).iter().zip(&h).zip(&hj) {
            assert!((a - (b + c * r)).norm() <= 1e-12 * (b + c * r).norm());
        }
        // Error points along the interferer's channel.
        let err: Vec<Complex64> = e.h_hat.column(0).iter().zip(&h).map(|(a, b)| a - b).collect();
        let dot: Complex64 = err.iter().zip(&hj).map(|(a, b)| a.conj() * b).sum();
        let n = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(dot.norm() / (n(&err) * n(&hj)) > 0.999);
    }

    #[test]
    fn perfect_mode_ignores_contamination() {
        let mut rng = seeded(4);
        let h = random_vec(8, 1.0, &mut rng);
        let hj = random_vec(8, 1.0, &mut rng);
        let t = [PilotTransmission { user: 0, pilot: Some(1), power_mw: 1.0, h: &h }];
        let o = [PilotTransmission { user: 1, pilot: Some(1), power_mw: 1.0, h: &hj }];
        let e = estimate_channels(&t, &o, 1.0, CsiMode::Perfect, &mut rng).unwrap();
        assert_eq!(e.h_hat.column(0).iter().cloned().collect::<Vec<_>>(), h);
    }

    #[test]
    fn missing_pilot_is_an_error() {
        let h = vec![Complex64::new(1.0, 0.0); 4];
        let t = [PilotTransmission { user: 7, pilot: None, power_mw: 1.0, h: &h }];
        assert!(matches!(
            estimate_channels(&t, &[], 0.0, CsiMode::LsContaminated, &mut seeded(0)),
            Err(Error::MissingPilot { user: 7 })
        ));
    }

    #[test]
    fn single_column_is_matched_filter() {
        let mut rng = seeded(5);
        let h = random_vec(128, 1e-4, &mut rng);
        let p = zf_precoder(&est(std::slice::from_ref(&h)), 794.0).unwrap();
        let w = p.w.column(0);
        assert_abs_diff_eq!(w.norm_squared(), 794.0, epsilon = 794.0 * 1e-12);
        let dot: Complex64 = w.iter().zip(&h).map(|(w, h)| h.conj() * w).sum();
        let hn = h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(dot.norm(), hn * 794f64.sqrt(), epsilon = 1e-9 * dot.norm());
    }

    #[test]
    fn orthogonal_columns_are_matched_individually() {
        let n = 8;
        let cols: Vec<Vec<Complex64>> = (0..3)
            .map(|k| {
                (0..n)
                    .map(|i| Complex64::from_polar(0.5 + k as f64, std::f64::consts::TAU * (k * i) as f64 / n as f64))
                    .collect()
            })
            .collect();
        let p = zf_precoder(&est(&cols), 3.0).unwrap();
        for (k, c) in cols.iter().enumerate() {
            let w = p.w.column(k);
            let dot: Complex64 = c.iter().zip(w.iter()).map(|(h, w)| h.conj() * w).sum();
            let cn = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            assert_abs_diff_eq!(dot.norm(), cn * w.norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn zf_identity_and_power_contract() {
        let mut rng = seeded(6);
        for k in 1..=8 {
            let cols: Vec<Vec<Complex64>> = (0..k).map(|_| random_vec(128, 1e-5, &mut rng)).collect();
            let e = est(&cols);
            let p = zf_precoder(&e, 794.3).unwrap();
            let g = e.h_hat.adjoint() * &p.w;
            for i in 0..k {
                assert!(g[(i, i)].im.abs() < 1e-9 * g[(i, i)].re && g[(i, i)].re > 0.0);
                for j in 0..k {
                    if i != j {
                        assert!(g[(i, j)].norm() < 1e-9 * g[(j, j)].norm());
                    }
                }
                let pw = p.w.column(i).norm_squared();
                assert!((pw - 794.3 / k as f64).abs() / (794.3 / k as f64) < 1e-12);
            }
            assert!((p.total_power() - 794.3).abs() / 794.3 < 1e-12);
        }
    }

    #[test]
    fn collinear_columns_drop_the_weakest() {
        let mut rng = seeded(7);
        let a = random_vec(16, 1.0, &mut rng);
        let b: Vec<Complex64> = a.iter().map(|x| x * 0.5).collect();
        let c = random_vec(16, 1.0, &mut rng);
        let p = zf_precoder(&est(&[a, b, c]), 1.0).unwrap();
        assert_eq!(p.dropped, vec![1]);
        assert_eq!(p.users, vec![0, 2]);
        assert!(p.condition_number <= MAX_GRAM_CONDITION);
    }

    #[test]
    fn perfect_csi_nulls_intra_cell_interference() {
        let mut rng = seeded(8);
        let cols: Vec<Vec<Complex64>> = (0..8).map(|_| random_vec(128, 1e-5, &mut rng)).collect();
        let p = zf_precoder(&est(&cols), 794.0).unwrap();
        let sigma2 = 5.7e-12;
        let t = sinr_mu_terms(3, 0, &p, &cols[3], &[], sigma2).unwrap();
        assert!(t.intra <= 1e-20 * t.signal);
        assert_abs_diff_eq!(t.sinr(), t.signal / sigma2, epsilon = 1e-9 * t.sinr());
        assert!(matches!(sinr_mu(99, 4, &p, &cols[0], &[], sigma2), Err(Error::NotScheduled { user: 99, prb: 4 })));
    }

    #[test]
    fn contaminated_csi_leaves_residual() {
        let mut rng = seeded(9);
        let cols: Vec<Vec<Complex64>> = (0..4).map(|_| random_vec(64, 1e-5, &mut rng)).collect();
        let intruder = random_vec(64, 1e-5, &mut rng);
        let targets: Vec<PilotTransmission> = cols
            .iter()
            .enumerate()
            .map(|(u, h)| PilotTransmission { user: u, pilot: Some(u), power_mw: 1.0, h })
            .collect();
        let o = [PilotTransmission { user: 10, pilot: Some(2), power_mw: 1.0, h: &intruder }];
        let e = estimate_channels(&targets, &o, 0.0, CsiMode::LsContaminated, &mut rng).unwrap();
        let p = zf_precoder(&e, 1.0).unwrap();
        // User 0's estimate is clean, so the other beams still null it exactly.
        let clean = sinr_mu_terms(0, 0, &p, &cols[0], &[], 1e-12).unwrap();
        assert!(clean.intra <= 1e-20 * clean.signal);
        // The beams are nulled toward the contaminated estimate of user 2, not its true channel.
        let t = sinr_mu_terms(2, 0, &p, &cols[2], &[], 1e-12).unwrap();
        assert!(t.intra > 1e-6 * t.signal, "{t:?}");
    }

    #[test]
    fn louder_co_pilot_hurts_the_victim() {
        let sinr_at = |seed: u64, pj: f64| {
            let mut rng = seeded(seed);
            let cols: Vec<Vec<Complex64>> = (0..3).map(|_| random_vec(64, 1e-5, &mut rng)).collect();
            let intruder = random_vec(64, 1e-5, &mut rng);
            let targets: Vec<PilotTransmission> = cols
                .iter()
                .enumerate()
                .map(|(u, h)| PilotTransmission { user: u, pilot: Some(u), power_mw: 1.0, h })
                .collect();
            let o = [PilotTransmission { user: 9, pilot: Some(0), power_mw: pj, h: &intruder }];
            let e = estimate_channels(&targets, &o, 0.0, CsiMode::LsContaminated, &mut rng).unwrap();
            let p = zf_precoder(&e, 1.0).unwrap();
            sinr_mu(0, 0, &p, &cols[0], &[], 1e-12).unwrap()
        };
        for seed in 0..20 {
            let quiet = sinr_at(seed, 1e-3);
            let loud = sinr_at(seed, 1e2);
            assert!(loud < quiet, "seed {seed}: {loud} >= {quiet}");
        }
    }

    #[test]
    fn mu_schedule_fairness() {
        let users: Vec<usize> = (0..15).collect();
        let g = schedule_mu(&users, 8, 50, &mut seeded(11));
        assert!(g.iter().all(|x| x.len() == 8));
        for u in 0..15 {
            let n = g.iter().filter(|x| x.contains(&u)).count();
            assert!(n == 26 || n == 27, "{n}");
        }
        let g = schedule_mu(&users[..8], 8, 50, &mut seeded(12));
        assert!(g.iter().all(|x| {
            let mut s = x.clone();
            s.sort();
            s == (0..8).collect::<Vec<_>>()
        }));
        let g = schedule_mu(&[4], 8, 50, &mut seeded(13));
        assert!(g.iter().all(|x| x == &vec![4]));
        assert!(schedule_mu(&[], 8, 5, &mut seeded(0)).iter().all(|x| x.is_empty()));
    }

    #[test]
    fn fairness_for_any_cell_load() {
        for k in 1..=40 {
            let users: Vec<usize> = (0..k).collect();
            let g = schedule_mu(&users, 8, 50, &mut seeded(k as u64));
            let share = 50.0 * 8f64.min(k as f64) / k as f64;
            for u in 0..k {
                let n = g.iter().filter(|x| x.contains(&u)).count() as f64;
                assert!(n >= share.floor() && n <= share.ceil(), "k={k} n={n}");
            }
        }
    }
}
