//! Validates the analytic model against the discrete-event simulator on an
//! asymmetric two-WLAN topology across contention-window sizes. At small
//! windows the product form tracks the simulator; as the window grows the
//! product form drifts while the exact global-balance solution stays on.
//!
//! Run with `cargo run --release --example validate_simulation`.

use dcb_wlan::channels::{NetworkAllocation, SelectionMode};
use dcb_wlan::ctmc::{
    enumerate_state_space, exact_distribution, product_form_distribution, throughput,
    EnumerationLimits, TrafficModel, MBPS,
};
use dcb_wlan::mac_phy::{ActivityModel, DurationTable, MacPhyParams};
use dcb_wlan::sim::{simulate, SimConfig};

fn main() -> dcb_wlan::Result<()> {
    let net = NetworkAllocation::parse(4, &["1,2~", "1,2,3~4"])?;
    let limits = EnumerationLimits::default();

    println!(
        "{:>4} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "cw", "wlan", "sim", "product", "exact", "err_prod", "err_exact"
    );
    for cw in [16.0, 32.0, 64.0, 128.0] {
        let params = MacPhyParams {
            contention_window_slots: cw,
            ..Default::default()
        };
        let model = ActivityModel::from_params(&params, DurationTable::default())?;
        let traffic = TrafficModel::homogeneous(&model, 2);

        let cfg = SimConfig {
            horizon: 60.0,
            replications: 12,
            seed: 31,
            ..Default::default()
        };
        let sim = simulate(&net, &traffic, &cfg)?;

        let space = enumerate_state_space(&net, &traffic, SelectionMode::Aligned, &limits)?;
        let pf = product_form_distribution(&space, &traffic)?;
        let product = throughput(&space, &pf, &traffic, &net)?.per_wlan;
        let exact_dist = exact_distribution(&space, &limits)?;
        let exact = throughput(&space, &exact_dist, &traffic, &net)?.per_wlan;

        for (w, name) in ["A", "B"].iter().enumerate() {
            let s = sim.per_wlan_throughput[w];
            println!(
                "{cw:>4} {name:>6} {:>10.3} {:>10.3} {:>10.3} {:>9.2}% {:>9.2}%",
                s / MBPS,
                product[w] / MBPS,
                exact[w] / MBPS,
                100.0 * (s - product[w]).abs() / product[w],
                100.0 * (s - exact[w]).abs() / exact[w]
            );
        }
    }
    Ok(())
}
