//! Checks that stationary throughputs depend on the backoff and
//! transmission distributions only through their means: the simulator runs
//! the same topology under several distribution pairs and reports the worst
//! pairwise spread.
//!
//! Run with `cargo run --release --example insensitivity`.

use dcb_wlan::channels::NetworkAllocation;
use dcb_wlan::ctmc::{TrafficModel, MBPS};
use dcb_wlan::mac_phy::ActivityModel;
use dcb_wlan::sim::{
    insensitivity_check, BackoffDistribution, SimConfig, TransmissionDistribution,
};

fn main() -> dcb_wlan::Result<()> {
    let net = NetworkAllocation::parse(4, &["1~", "2~", "3~", "4~"])?;
    let traffic = TrafficModel::homogeneous(&ActivityModel::default(), net.len());
    let cfg = SimConfig {
        horizon: 60.0,
        replications: 12,
        seed: 8,
        ..Default::default()
    };
    let choices = [
        (
            BackoffDistribution::Exponential,
            TransmissionDistribution::Exponential,
        ),
        (
            BackoffDistribution::Exponential,
            TransmissionDistribution::Deterministic,
        ),
        (
            BackoffDistribution::Uniform,
            TransmissionDistribution::Exponential,
        ),
        (
            BackoffDistribution::Deterministic,
            TransmissionDistribution::Deterministic,
        ),
    ];
    let report = insensitivity_check(&net, &traffic, &cfg, &choices)?;

    for (backoff, transmission, throughputs) in &report.configurations {
        let mbps: Vec<String> = throughputs
            .iter()
            .map(|t| format!("{:.3}", t / MBPS))
            .collect();
        println!(
            "{backoff:?} backoff / {transmission:?} transmission: {} Mbps",
            mbps.join(" ")
        );
    }
    println!(
        "\nmax pairwise relative deviation: {:.4}%",
        100.0 * report.max_relative_deviation
    );
    Ok(())
}
