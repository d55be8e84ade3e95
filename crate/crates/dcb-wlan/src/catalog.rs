//! Closed-form throughput and spectrum-efficiency expressions for small
//! reference topologies, used to cross-check the CTMC engine.
//!
//! All expressions are functions of the activity ratios `rho(1)`, `rho(2)`,
//! `rho(4)`; throughputs are normalized by `lambda * L` unless stated
//! otherwise.

use crate::error::Result;
use crate::mac_phy::ActivityModel;

/// Activity ratios at widths 1, 2 and 4 for a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub rho1: f64,
    pub rho2: f64,
    pub rho4: f64,
}

impl Ratios {
    pub fn from_model(model: &ActivityModel) -> Result<Self> {
        Ok(Self {
            rho1: model.activity_ratio(1)?,
            rho2: model.activity_ratio(2)?,
            rho4: model.activity_ratio(4)?,
        })
    }
}

/// Four WLANs all assigned the same four-channel block (distinct primaries):
/// normalized aggregate `4 / (1 + 4 rho(4))`.
pub fn totally_overlapped_aggregate(r: Ratios) -> f64 {
    4.0 / (1.0 + 4.0 * r.rho4)
}

/// Four WLANs on disjoint single channels: `4 / (1 + rho(1))`.
pub fn non_overlapped_aggregate(r: Ratios) -> f64 {
    4.0 / (1.0 + r.rho1)
}

/// One full-band WLAN plus 40/40/20 MHz WLANs underneath it, all primaries
/// distinct.
pub fn partially_overlapped_aggregate(r: Ratios) -> f64 {
    let (p1, p2, p4) = (r.rho1, r.rho2, r.rho4);
    let numerator = 6.0 + 8.0 * p2 + 6.0 * p1 + 2.0 * p1 * p1 + 4.0 * p1 * p2;
    let denominator = 1.0
        + p4
        + 3.0 * p2
        + 2.0 * p1
        + 2.0 * p2 * p2
        + 4.0 * p1 * p2
        + p1 * p1
        + 2.0 * p1 * p1 * p2;
    numerator / denominator
}

/// Same channel sets as the partially-overlapped case but with the primary
/// channels colliding pairwise.
pub fn primary_overlapped_aggregate(r: Ratios) -> f64 {
    let (p1, p2, p4) = (r.rho1, r.rho2, r.rho4);
    let numerator = 5.0 + 6.0 * p2 + 2.0 * p1;
    let denominator = 1.0 + p4 + 3.0 * p2 + p1 + 2.0 * p2 * p2 + 2.0 * p1 * p2;
    numerator / denominator
}

/// A two-WLAN overlap pattern from the spectrum-efficiency catalog.
#[derive(Debug, Clone, Copy)]
pub struct SePattern {
    pub id: &'static str,
    /// Allocation literals of the two WLANs on a four-channel grid.
    pub wlan_i: &'static str,
    pub wlan_j: &'static str,
    /// Number of overlapped channels shared by the pair.
    pub overlap: u32,
    /// Closed-form spectrum efficiency in units of `lambda*L` per MHz.
    pub eta: fn(Ratios) -> f64,
}

/// The ten ways two WLANs can overlap on a four-channel grid (up to
/// relabeling), with closed-form spectrum efficiencies.
///
/// The `s05` denominator is derived from the state space of the pattern:
/// the wide WLAN falls back to its bare primary channel whenever the narrow
/// WLAN is active, so the normalization carries `2 rho(1)` and never a
/// `rho(2)` term.
pub const SE_PATTERNS: [SePattern; 10] = [
    SePattern {
        id: "s01",
        wlan_i: "1~",
        wlan_j: "1~",
        overlap: 1,
        eta: |r| 2.0 / (20.0 * (1.0 + 2.0 * r.rho1)),
    },
    SePattern {
        id: "s02",
        wlan_i: "1~",
        wlan_j: "1~2",
        overlap: 1,
        eta: |r| 2.0 / (40.0 * (1.0 + r.rho1 + r.rho2)),
    },
    SePattern {
        id: "s03",
        wlan_i: "1~",
        wlan_j: "1,2~",
        overlap: 1,
        eta: |r| (3.0 + 2.0 * r.rho1) / (40.0 * (1.0 + 2.0 * r.rho1 + r.rho2 + r.rho1 * r.rho1)),
    },
    SePattern {
        id: "s04",
        wlan_i: "1~",
        wlan_j: "1~2,3,4",
        overlap: 1,
        eta: |r| 2.0 / (80.0 * (1.0 + r.rho1 + r.rho4)),
    },
    SePattern {
        id: "s05",
        wlan_i: "1~",
        wlan_j: "1,2~3,4",
        overlap: 1,
        eta: |r| (3.0 + 2.0 * r.rho1) / (80.0 * (1.0 + 2.0 * r.rho1 + r.rho4 + r.rho1 * r.rho1)),
    },
    SePattern {
        id: "s06",
        wlan_i: "1~",
        wlan_j: "1,2,3~4",
        overlap: 1,
        eta: |r| {
            (3.0 + r.rho1 + r.rho2) / (80.0 * (1.0 + r.rho1 + r.rho2 + r.rho4 + r.rho1 * r.rho2))
        },
    },
    SePattern {
        id: "s07",
        wlan_i: "1~2",
        wlan_j: "1~2",
        overlap: 2,
        eta: |r| 2.0 / (40.0 * (1.0 + 2.0 * r.rho2)),
    },
    SePattern {
        id: "s08",
        wlan_i: "1~2",
        wlan_j: "1~2,3,4",
        overlap: 2,
        eta: |r| 2.0 / (80.0 * (1.0 + r.rho2 + r.rho4)),
    },
    SePattern {
        id: "s09",
        wlan_i: "1~2",
        wlan_j: "1,2,3~4",
        overlap: 2,
        eta: |r| (3.0 + 2.0 * r.rho2) / (80.0 * (1.0 + 2.0 * r.rho2 + r.rho4 + r.rho2 * r.rho2)),
    },
    SePattern {
        id: "s10",
        wlan_i: "1~2,3,4",
        wlan_j: "1~2,3,4",
        overlap: 4,
        eta: |r| 2.0 / (80.0 * (1.0 + 2.0 * r.rho4)),
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn ratios() -> Ratios {
        Ratios::from_model(&ActivityModel::default()).unwrap()
    }

    #[test]
    fn reference_normalized_aggregates() {
        let r = ratios();
        assert!((totally_overlapped_aggregate(r) - 0.0155).abs() < 5e-4);
        assert!((non_overlapped_aggregate(r) - 0.0234).abs() < 5e-4);
        assert!((partially_overlapped_aggregate(r) - 0.0225).abs() < 5e-4);
        assert!((primary_overlapped_aggregate(r) - 0.0184).abs() < 5e-4);
    }

    #[test]
    fn less_overlap_is_better() {
        let r = ratios();
        let no = non_overlapped_aggregate(r);
        let po = partially_overlapped_aggregate(r);
        let ppo = primary_overlapped_aggregate(r);
        let to = totally_overlapped_aggregate(r);
        assert!(no > po && po > ppo && ppo > to);
    }

    #[test]
    fn single_channel_sharing_has_the_best_spectrum_efficiency() {
        let r = ratios();
        let etas: Vec<f64> = SE_PATTERNS.iter().map(|p| (p.eta)(r)).collect();
        let best = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((etas[0] - best).abs() < 1e-15, "s01 should maximize SE");
    }
}
