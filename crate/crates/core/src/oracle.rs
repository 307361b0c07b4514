//! Brute-force reference computations for cross-checking the fast paths.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::complex_normal;
use crate::deployment::{CellId, NetworkLayout, Point3, UserDrop};

/// One transmitting cell as seen by the target receiver.
#[derive(Debug, Clone)]
pub struct SymbolSource {
    /// Channel from this cell's BS to the target user.
    pub h: Vec<Complex64>,
    /// Precoders (one column per stream), power included.
    pub w: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub sinr: f64,
    pub stderr: f64,
}

/// Monte Carlo SINR of stream `target_stream` of `sources[serving]` from the
/// received symbols `y = sum_j h_j^H W_j s_j + e`. Each symbol period draws
/// independent unit-variance data on every stream and noise of variance
/// `sigma2`; the wanted part is separated using the known data symbol.
pub fn symbol_level_sinr<R: Rng + ?Sized>(
    sources: &[SymbolSource],
    serving: usize,
    target_stream: usize,
    sigma2: f64,
    n_symbols: usize,
    rng: &mut R,
) -> OracleEstimate {
    let n = n_symbols.max(2);
    // Effective scalar gain of every (cell, stream); fixed over the coherence block.
    let gains: Vec<Vec<Complex64>> = sources
        .iter()
        .map(|src| {
            src.w.column_iter().map(|col| src.h.iter().zip(col.iter()).map(|(h, w)| h.conj() * w).sum()).collect()
        })
        .collect();
    let (mut sig, mut sig2, mut dis, mut dis2, mut cross) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let mut y = complex_normal(rng) * sigma2.sqrt();
        let mut wanted = Complex64::new(0.0, 0.0);
        for (j, g) in gains.iter().enumerate() {
            for (i, &gain) in g.iter().enumerate() {
                let term = gain * complex_normal(rng);
                y += term;
                if j == serving && i == target_stream {
                    wanted = term;
                }
            }
        }
        let a = wanted.norm_sqr();
        let b = (y - wanted).norm_sqr();
        sig += a;
        sig2 += a * a;
        dis += b;
        dis2 += b * b;
        cross += a * b;
    }
    let nf = n as f64;
    let (ma, mb) = (sig / nf, dis / nf);
    let va = sig2 / nf - ma * ma;
    let vb = dis2 / nf - mb * mb;
    let cab = cross / nf - ma * mb;
    let r = ma / mb;
    // Delta method for a ratio of means.
    let var = r * r * (va / (ma * ma) + vb / (mb * mb) - 2.0 * cab / (ma * mb)) / nf;
    OracleEstimate { sinr: r, stderr: var.max(0.0).sqrt() }
}

/// Serving cell of every user by enumerating all cells and all wrap images.
/// For each `(site, user)` pair the nearest image is used, as in the wrapped
/// network; `rsrp(cell, user, offset)` evaluates a cell at a BS-to-user offset.
pub fn exhaustive_association(
    layout: &NetworkLayout,
    users: &[UserDrop],
    rsrp: impl Fn(CellId, usize, Point3) -> f64,
) -> Vec<CellId> {
    users
        .iter()
        .enumerate()
        .map(|(ui, u)| {
            let mut best: Option<(f64, CellId)> = None;
            for (s, site) in layout.sites.iter().enumerate() {
                let mut offset = Point3::default();
                let mut nearest = f64::INFINITY;
                for &(wx, wy) in &layout.wrap_vectors {
                    let dx = u.position.x + wx - site.x;
                    let dy = u.position.y + wy - site.y;
                    let d = (dx * dx + dy * dy).sqrt();
                    if d < nearest {
                        nearest = d;
                        offset = Point3::new(dx, dy, u.position.z - layout.bs_height);
                    }
                }
                for sector in 0..layout.sectors_per_site {
                    let cell = s * layout.sectors_per_site + sector;
                    let v = rsrp(cell, ui, offset);
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, cell));
                    }
                }
            }
            best.map(|(_, c)| c).unwrap_or(0)
        })
        .collect()
}
