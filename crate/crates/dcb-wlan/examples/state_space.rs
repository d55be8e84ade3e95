//! Enumerates the reachable network states of a two-WLAN topology, prints
//! the product-form stationary distribution next to the exact
//! global-balance solution, and shows where the two disagree.
//!
//! Run with `cargo run --example state_space`.

use dcb_wlan::channels::{NetworkAllocation, SelectionMode};
use dcb_wlan::ctmc::{
    balance_residual, enumerate_state_space, exact_distribution, product_form_distribution,
    throughput, EnumerationLimits, TrafficModel, MBPS,
};
use dcb_wlan::mac_phy::ActivityModel;

fn main() -> dcb_wlan::Result<()> {
    // A 40 MHz WLAN under an 80 MHz WLAN; the wide one falls back to its
    // upper 40 MHz whenever the narrow one transmits.
    let net = NetworkAllocation::parse(4, &["1,2~", "1,2,3~4"])?;
    let model = ActivityModel::default();
    let traffic = TrafficModel::homogeneous(&model, net.len());
    let names = vec!["A".to_string(), "B".to_string()];

    let limits = EnumerationLimits::default();
    let space = enumerate_state_space(&net, &traffic, SelectionMode::Aligned, &limits)?;
    let pf = product_form_distribution(&space, &traffic)?;
    let exact = exact_distribution(&space, &limits)?;

    println!("{} reachable states:", space.len());
    println!("{:<16} {:>12} {:>12}", "state", "product", "exact");
    for (i, state) in space.states.iter().enumerate() {
        let label = if state.is_empty() {
            "(idle)".to_string()
        } else {
            state.label(&names)
        };
        println!("{label:<16} {:>12.6} {:>12.6}", pf.get(i), exact.get(i));
    }

    let residual = balance_residual(&space, &traffic)?;
    println!("\nglobal-balance residual of the product form: {residual:.3}");

    let pf_report = throughput(&space, &pf, &traffic, &net)?;
    let exact_report = throughput(&space, &exact, &traffic, &net)?;
    for (w, name) in names.iter().enumerate() {
        println!(
            "WLAN {name}: product-form {:.3} Mbps, exact {:.3} Mbps",
            pf_report.per_wlan[w] / MBPS,
            exact_report.per_wlan[w] / MBPS
        );
    }
    Ok(())
}
