//! Loads a scenario from JSON and prints its analysis CSV, including the
//! exact-distribution columns; the same flow backs `dcb analyze`.
//!
//! Run with `cargo run --example scenario_files [path/to/scenario.json]`.

use std::path::PathBuf;

use dcb_wlan::commands::{cmd_analyze, AnalyzeOptions};
use dcb_wlan::scenario::ScenarioFile;

fn main() -> dcb_wlan::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("scenarios/two_wlan_partial_overlap.json")
        });
    eprintln!("scenario: {}", path.display());
    let scenario = ScenarioFile::from_path(&path)?.build(None, None)?;
    let opts = AnalyzeOptions {
        exact: true,
        spectrum_efficiency: true,
        ..Default::default()
    };
    print!("{}", cmd_analyze(&scenario, &opts)?);
    Ok(())
}
