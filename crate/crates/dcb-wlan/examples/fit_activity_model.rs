//! Fits the continuous power-law activity-ratio model to a duration table
//! and reports the fit quality, then shows how the fitted curve feeds the
//! continuous relaxation of the allocation problem.
//!
//! Run with `cargo run --example fit_activity_model`.

use dcb_wlan::mac_phy::{fit_power_law, ActivityModel, FittedActivityModel};
use dcb_wlan::optim::{relax_channels, ProblemInstance};

fn main() -> dcb_wlan::Result<()> {
    let model = ActivityModel::default();
    let points: Vec<(f64, f64)> = [1u32, 2, 4, 8]
        .iter()
        .map(|&k| Ok((f64::from(k), model.activity_ratio(k)?)))
        .collect::<dcb_wlan::Result<_>>()?;

    println!("tabulated activity ratios:");
    for (k, rho) in &points {
        println!("  rho({k}) = {rho:.4}");
    }

    let fit = fit_power_law(&points)?;
    println!(
        "\nleast-squares power law: rho'(k) = {:.4} / k^{:.4}",
        fit.model.scale, fit.model.exponent
    );
    println!(
        "correlation with the table: {:.4} (acceptable: {})",
        fit.correlation,
        fit.is_acceptable()
    );

    let shipped = FittedActivityModel::default();
    println!(
        "\nshipped constants: rho'(k) = {:.4} / k^{:.4}",
        shipped.scale, shipped.exponent
    );
    for &(k, rho) in &points {
        println!(
            "  k={k}: table {rho:8.4}  fitted {:8.4}  shipped {:8.4}",
            fit.model.ratio(k)?,
            shipped.ratio(k)?
        );
    }

    // The fitted curve makes the relaxed allocation problem smooth: the
    // unconstrained optimum splits the channels evenly.
    let instance = ProblemInstance::new(3, 7)?;
    let node = relax_channels(&instance, None)?;
    println!(
        "\nrelaxed split of 7 channels over 3 WLANs: {:?} (bound {:.4} Mbps)",
        node.relaxed_solution,
        node.relaxed_value / 1e6
    );
    Ok(())
}
