//! Evaluates the four canonical overlap patterns of four WLANs on four
//! channels and checks each CTMC aggregate against its closed form: less
//! channel overlap (and less primary-channel overlap) means more aggregate
//! throughput.
//!
//! Run with `cargo run --example four_overlap_patterns`.

use std::path::PathBuf;

use dcb_wlan::catalog::{
    non_overlapped_aggregate, partially_overlapped_aggregate, primary_overlapped_aggregate,
    totally_overlapped_aggregate, Ratios,
};
use dcb_wlan::ctmc::{evaluate_allocation, EnumerationLimits};
use dcb_wlan::mac_phy::ActivityModel;
use dcb_wlan::scenario::ScenarioFile;

fn main() -> dcb_wlan::Result<()> {
    type ClosedForm = fn(Ratios) -> f64;
    let ratios = Ratios::from_model(&ActivityModel::default())?;
    let cases: [(&str, ClosedForm); 4] = [
        ("four_wlan_non_overlapped.json", non_overlapped_aggregate),
        (
            "four_wlan_partially_overlapped.json",
            partially_overlapped_aggregate,
        ),
        (
            "four_wlan_primary_overlapped.json",
            primary_overlapped_aggregate,
        ),
        (
            "four_wlan_totally_overlapped.json",
            totally_overlapped_aggregate,
        ),
    ];

    println!(
        "{:<40} {:>10} {:>12} {:>12}",
        "scenario", "states", "ctmc", "closed form"
    );
    for (file, closed_form) in cases {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(file);
        let scenario = ScenarioFile::from_path(&path)?.build(None, None)?;
        let report = evaluate_allocation(
            &scenario.net,
            &scenario.traffic,
            &EnumerationLimits::default(),
        )?;
        let normalized = report.aggregate / scenario.model.lambda_l();
        println!(
            "{file:<40} {:>10} {normalized:>12.6} {:>12.6}",
            state_count(&scenario)?,
            closed_form(ratios)
        );
    }
    println!("\n(aggregates are normalized by lambda * L)");
    Ok(())
}

fn state_count(scenario: &dcb_wlan::scenario::Scenario) -> dcb_wlan::Result<usize> {
    let space = dcb_wlan::ctmc::enumerate_state_space(
        &scenario.net,
        &scenario.traffic,
        dcb_wlan::channels::SelectionMode::Aligned,
        &EnumerationLimits::default(),
    )?;
    Ok(space.len())
}
