use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;

use uavcc::antenna::{vertical_pattern, ArrayGeometry, ElementPattern};
use uavcc::channel::{synth_channel, LargeScaleState};
use uavcc::config::{CsiConfig, ScenarioConfig};
use uavcc::deployment::Case;
use uavcc::oracle::{symbol_level_sinr, SymbolSource};
use uavcc::phy_mu::{sinr_mu, zf_precoder, CsiMode, EstimatedChannelSet};
use uavcc::rng::seeded;
use uavcc::{run_scenario, Mode};

#[derive(Parser)]
#[command(name = "uavcc", version, about = "UAV command-and-control downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write metric files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "UAVCC_OUT")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<usize>,
        /// su or mu.
        #[arg(long)]
        mode: Option<Mode>,
        /// 3, 4 or 5.
        #[arg(long = "case")]
        case: Option<Case>,
        /// perfect, r3_pc or r3_ep.
        #[arg(long)]
        csi: Option<CsiConfig>,
        /// Place every UAV at this height.
        #[arg(long)]
        uav_height: Option<f64>,
    },
    /// Write the vertical pattern of the single-user column as CSV.
    Pattern {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Parse and check a config file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare the closed-form SINR with a symbol-level simulation on toy instances.
    Oracle {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        symbols: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, seed, drops, mode, case, csi, uav_height } => {
            let mut cfg = ScenarioConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(d) = drops {
                cfg.drops = d;
            }
            if let Some(m) = mode {
                cfg.mode = m;
            }
            if let Some(c) = case {
                cfg.deployment.case = c;
            }
            if let Some(c) = csi {
                cfg.mu.csi_mode = c;
            }
            if uav_height.is_some() {
                cfg.deployment.uav_fixed_height_m = uav_height;
            }
            cfg.validate()?;
            let report = run_scenario(&cfg)?;
            let summary = report.write(&out).with_context(|| format!("writing to {}", out.display()))?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for (group, r) in &summary.reliability {
                println!("{group}: P(rate >= {} bps) = {r:.3}", summary.target_rate_bps);
            }
            println!("wrote {}", out.display());
        }
        Command::Pattern { out, step } => {
            anyhow::ensure!(step > 0.0 && step <= 90.0, "step must lie in (0, 90]");
            let samples = vertical_pattern(&ArrayGeometry::single_user(), &ElementPattern::default(), step)?;
            let mut csv = String::from("elevation_deg,gain_dbi\n");
            for (el, g) in samples {
                writeln!(csv, "{el:.4},{g:.6}")?;
            }
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Validate { config } => {
            ScenarioConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            println!("{}: ok", config.display());
        }
        Command::Oracle { seed, symbols } => oracle(seed, symbols)?,
    }
    Ok(())
}

/// Two cells of an 8x1 panel serving one user each (single-user case) and
/// two 8x8 cells serving four users each (multi-user case).
fn oracle(seed: u64, symbols: usize) -> Result<()> {
    let mut rng = seeded(seed);
    let sigma2 = 1e-11;
    let ls = |az: f64, el: f64, pl: f64| LargeScaleState {
        los: true,
        path_loss_db: pl,
        shadow_db: 0.0,
        o2i_db: 0.0,
        azimuth_deg: az,
        elevation_deg: el,
    };
    let p = ElementPattern::default();

    let su = ArrayGeometry::single_user();
    let n = su.n_antennas();
    let p_b = 794.3;
    let w = DMatrix::from_element(n, 1, Complex64::new((p_b / n as f64).sqrt(), 0.0));
    let h0 = synth_channel(&su, &p, &ls(5.0, -8.0, 105.0), 9.0, &mut rng).h;
    let h1 = synth_channel(&su, &p, &ls(-40.0, -3.0, 112.0), 9.0, &mut rng).h;
    let gain = |h: &[Complex64]| h.iter().map(|x| x.conj() * (p_b / n as f64).sqrt()).sum::<Complex64>().norm_sqr();
    let closed = gain(&h0) / (gain(&h1) + sigma2);
    let est = symbol_level_sinr(
        &[SymbolSource { h: h0, w: w.clone() }, SymbolSource { h: h1, w }],
        0,
        0,
        sigma2,
        symbols,
        &mut rng,
    );
    println!("su: closed form {closed:.6e}, symbol level {:.6e} +- {:.2e}", est.sinr, est.stderr);

    let mu = ArrayGeometry::multi_user();
    let mk = |az0: f64, rng: &mut _| -> Vec<Vec<Complex64>> {
        (0..4).map(|k| synth_channel(&mu, &p, &ls(az0 + 12.0 * k as f64, -6.0, 108.0), 6.0, rng).h).collect()
    };
    let own = mk(-20.0, &mut rng);
    let other = mk(10.0, &mut rng);
    let cross: Vec<Complex64> = synth_channel(&mu, &p, &ls(70.0, -2.0, 118.0), 6.0, &mut rng).h;
    let set = |cols: &[Vec<Complex64>]| EstimatedChannelSet {
        users: (0..cols.len()).collect(),
        h_hat: DMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r]),
        mode: CsiMode::Perfect,
    };
    let w0 = zf_precoder(&set(&own), p_b)?;
    let w1 = zf_precoder(&set(&other), p_b)?;
    let closed = sinr_mu(0, 0, &w0, &own[0], &[(&w1, &cross)], sigma2)?;
    let est = symbol_level_sinr(
        &[SymbolSource { h: own[0].clone(), w: w0.w.clone() }, SymbolSource { h: cross, w: w1.w.clone() }],
        0,
        0,
        sigma2,
        symbols,
        &mut rng,
    );
    println!("mu: closed form {closed:.6e}, symbol level {:.6e} +- {:.2e}", est.sinr, est.stderr);
    Ok(())
}
