//! Brute-force check of the allocation solver at desk scale: enumerate
//! every (block, primary) assignment for small networks, score each with
//! the CTMC, and confirm that the best allocation has the least-overlap
//! structure and the solver's value.
//!
//! Run with `cargo run --release --example exhaustive_check`.

use dcb_wlan::channels::overlap_metrics;
use dcb_wlan::ctmc::MBPS;
use dcb_wlan::optim::{exhaustive_search, optimize, ProblemInstance};

fn main() -> dcb_wlan::Result<()> {
    for (n, k) in [(2usize, 4u32), (3, 4), (4, 4), (5, 4)] {
        let instance = ProblemInstance::new(n, k)?;
        let (best_net, best_value) = exhaustive_search(&instance, 10_000_000)?;
        let solved = optimize(&instance)?;
        let literals: Vec<String> = best_net.iter().map(|a| a.to_string()).collect();
        println!(
            "N={n}, K={k}: exhaustive best {} at {:.4} Mbps (overlap degree {}), solver {:.4} Mbps",
            literals.join(" "),
            best_value / MBPS,
            overlap_metrics(&best_net).max_overlap,
            solved.report.aggregate / MBPS
        );
    }
    Ok(())
}
