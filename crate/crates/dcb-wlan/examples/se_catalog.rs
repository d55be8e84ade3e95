//! Prints the catalog of two-WLAN overlap patterns with their closed-form
//! and CTMC spectrum efficiencies: sharing a single channel (and its
//! primary) wastes the least spectrum, which is why surplus WLANs are
//! grouped onto single channels rather than onto wide blocks.
//!
//! Run with `cargo run --example se_catalog`.

use dcb_wlan::commands::cmd_se_table;
use dcb_wlan::mac_phy::ActivityModel;

fn main() -> dcb_wlan::Result<()> {
    print!("{}", cmd_se_table(&ActivityModel::default())?);
    Ok(())
}
