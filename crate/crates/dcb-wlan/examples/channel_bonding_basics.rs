//! Channel grid, bonded blocks, allocation literals and the dynamic-bonding
//! selection rule.
//!
//! Run with `cargo run --example channel_bonding_basics`.

use dcb_wlan::channels::{
    dcb_select, overlap_metrics, ChannelGrid, ChannelSet, NetworkAllocation, WlanAllocation,
};

fn main() -> dcb_wlan::Result<()> {
    let grid = ChannelGrid::new(8)?;
    println!("valid bonded blocks on an 8-channel grid:");
    for block in grid.valid_blocks() {
        println!(
            "  {:>3} MHz  channels {}..{}",
            20 * block.width(),
            block.start(),
            block.end()
        );
    }

    // An 80 MHz allocation with the primary on channel 3, written in the
    // literal syntax (the tilde follows the primary channel).
    let alloc = WlanAllocation::parse("1,2,3~4", grid)?;
    println!("\nallocation {alloc}: primary {}", alloc.primary());

    // The transmission block picked at backoff expiry is the widest idle
    // aligned block containing the primary.
    for busy in [vec![], vec![1u32, 2], vec![4]] {
        let busy_set = ChannelSet::from_channels(busy.iter().copied());
        let picked = dcb_select(&alloc, busy_set)?;
        println!(
            "  busy {busy:?} -> transmit on channels {}..{} ({} MHz)",
            picked.start(),
            picked.end(),
            20 * picked.width()
        );
    }

    // Overlap metrics of a mixed four-WLAN allocation.
    let net = NetworkAllocation::parse(4, &["1~2,3,4", "1,2~", "3~4", "4~"])?;
    let report = overlap_metrics(&net);
    println!("\noverlap report for 1~2,3,4 | 1,2~ | 3~4 | 4~:");
    println!(
        "  per-WLAN overlapped channels: {:?}",
        report.per_wlan_overlap
    );
    println!("  overlap degree O(f) = {}", report.max_overlap);
    for set in &report.overlap_sets {
        println!("  WLANs {:?} share channels {:?}", set.wlans, set.channels);
    }
    Ok(())
}
