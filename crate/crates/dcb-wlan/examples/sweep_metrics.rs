//! Sweeps the network size on a four-channel grid and compares the solver
//! against the greedy and random baselines on aggregate throughput,
//! fairness and channel utilization (long-format CSV on stdout).
//!
//! Run with `cargo run --release --example sweep_metrics`.

use dcb_wlan::commands::{cmd_sweep, Method, Metric, SweepSpec};
use dcb_wlan::mac_phy::{ActivityModel, FittedActivityModel};

fn main() -> dcb_wlan::Result<()> {
    let spec = SweepSpec {
        channels: 4,
        wlans_from: 1,
        wlans_to: 8,
        methods: vec![
            Method::Bbm,
            Method::Greedy,
            Method::RandomFixed(2),
            Method::RandomVariable(4),
        ],
        draws: 200,
        metrics: vec![Metric::Throughput, Metric::Jfi, Metric::ChannelUtilization],
        seed: 1,
        exhaustive_cap: 10_000_000,
        activity: ActivityModel::default(),
        fit: FittedActivityModel::default(),
    };
    let out = cmd_sweep(&spec)?;
    for notice in &out.notices {
        eprintln!("note: {notice}");
    }
    print!("{}", out.csv);
    Ok(())
}
