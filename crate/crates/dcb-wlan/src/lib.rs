//! Throughput modeling and channel allocation for IEEE 802.11ac dynamic
//! channel bonding (DCB) WLANs that are all within carrier-sensing range of
//! each other.
//!
//! The crate provides:
//!
//! - [`channels`]: the 20 MHz channel grid, aligned bonded blocks, per-WLAN
//!   allocations (with a compact literal syntax), the DCB
//!   transmission-channel selection rule and overlap metrics.
//! - [`mac_phy`]: MAC/PHY parameters, the transmission-duration table,
//!   activity ratios and the fitted continuous activity-ratio model.
//! - [`ctmc`]: reachable state-space enumeration, the product-form
//!   stationary distribution, an exact global-balance cross-check, and
//!   throughput / fairness / utilization / spectrum-efficiency metrics.
//! - [`sim`]: a seedable discrete-event simulator of the contention
//!   process that validates the analytic model.
//! - [`optim`]: throughput-optimal channel allocation via Lagrangian
//!   relaxation plus branch-and-bound, with greedy, random and exhaustive
//!   baselines and concavity diagnostics.
//! - [`scenario`] and [`commands`]: JSON scenario files and the CSV
//!   workflows behind the `dcb` command-line tool.
//!
//! The examples directory walks through each capability; start with
//! `cargo run --example optimal_allocation`.

pub mod catalog;
pub mod channels;
pub mod commands;
pub mod ctmc;
pub mod error;
pub mod mac_phy;
pub mod optim;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
