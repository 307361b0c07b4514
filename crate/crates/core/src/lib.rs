//! System-level simulator for the downlink command-and-control link of UAVs
//! served by a cellular network, in a sectorized single-user (`su`) and a
//! massive MIMO multi-user (`mu`) deployment.
//!
//! A run is a sequence of independent drops. Each drop places users on a
//! wrapped hexagonal layout ([`deployment`]), samples large-scale and fading
//! channels ([`channel`]), associates users by RSRP ([`association`]),
//! schedules and evaluates per-PRB SINR ([`phy_su`], [`phy_mu`]), maps SINR to
//! rate ([`link_adaptation`]) and collects samples ([`metrics`]).
//! [`runner`] drives the loop and [`oracle`] holds brute-force references.

// Negated float comparisons are deliberate: they reject NaN in validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod association;
pub mod channel;
pub mod config;
pub mod deployment;
pub mod error;
pub mod link_adaptation;
pub mod metrics;
pub mod oracle;
pub mod phy_mu;
pub mod phy_su;
pub mod rng;
pub mod runner;

pub use association::Mode;
pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use runner::{run_scenario, run_scenario_with, Execution, RunReport};
