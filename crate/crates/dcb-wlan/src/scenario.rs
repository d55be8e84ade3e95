//! Scenario and parameter files (JSON) and their translation into
//! allocations and traffic models.
//!
//! A parameter file overrides any subset of the MAC/PHY constants, the
//! duration table (`duration_table_ms`, keyed by bonded-channel count) and
//! the fitted-ratio constants. A scenario file names the grid size and the
//! WLANs, each with an allocation literal and optional per-WLAN attempt
//! rate and payload overrides. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::channels::{ChannelGrid, NetworkAllocation, WlanAllocation};
use crate::ctmc::TrafficModel;
use crate::error::{Error, Result};
use crate::mac_phy::{ActivityModel, DurationTable, FittedActivityModel, MacPhyParams};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FitParams {
    pub a: f64,
    pub b: f64,
}

/// JSON schema of a parameter file; every field is optional and defaults to
/// the reference values.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub packet_length_bits: Option<f64>,
    pub aggregated_packets: Option<f64>,
    pub contention_window_slots: Option<f64>,
    pub slot_duration_us: Option<f64>,
    pub packet_error_prob: Option<f64>,
    pub duration_table_ms: Option<BTreeMap<String, f64>>,
    pub fit: Option<FitParams>,
}

impl ParamsFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn mac_phy(&self) -> MacPhyParams {
        let d = MacPhyParams::default();
        MacPhyParams {
            packet_length_bits: self.packet_length_bits.unwrap_or(d.packet_length_bits),
            aggregated_packets: self.aggregated_packets.unwrap_or(d.aggregated_packets),
            contention_window_slots: self
                .contention_window_slots
                .unwrap_or(d.contention_window_slots),
            slot_duration: self
                .slot_duration_us
                .map(|us| us * 1e-6)
                .unwrap_or(d.slot_duration),
            packet_error_prob: self.packet_error_prob.unwrap_or(d.packet_error_prob),
        }
    }

    pub fn durations(&self) -> Result<DurationTable> {
        match &self.duration_table_ms {
            None => Ok(DurationTable::default()),
            Some(map) => {
                let mut entries = BTreeMap::new();
                for (key, ms) in map {
                    let width: u32 = key.parse().map_err(|_| {
                        Error::Scenario(format!(
                            "duration table key `{key}` is not a channel count"
                        ))
                    })?;
                    entries.insert(width, ms * 1e-3);
                }
                DurationTable::new(entries)
            }
        }
    }

    pub fn fitted(&self) -> FittedActivityModel {
        match &self.fit {
            None => FittedActivityModel::default(),
            Some(f) => FittedActivityModel {
                exponent: f.a,
                scale: f.b,
            },
        }
    }

    pub fn activity_model(&self) -> Result<ActivityModel> {
        ActivityModel::from_params(&self.mac_phy(), self.durations()?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WlanSpec {
    pub name: String,
    /// Allocation literal, e.g. `"1~2,3,4"`.
    pub allocation: String,
    /// Attempt-rate override, 1/s.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Payload override, bits.
    #[serde(default)]
    pub payload_bits: Option<f64>,
}

/// JSON schema of a scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Number of basic channels in the grid.
    pub channels: u32,
    /// Inline parameter overrides; take precedence over a `--params` file.
    #[serde(default)]
    pub params: Option<ParamsFile>,
    pub wlans: Vec<WlanSpec>,
}

/// A scenario resolved into concrete model objects.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub net: NetworkAllocation,
    pub traffic: TrafficModel,
    pub names: Vec<String>,
    pub model: ActivityModel,
    pub fit: FittedActivityModel,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolves the scenario against optional base parameters (used when the
    /// file has no inline `params`) and an optional contention-window
    /// override.
    pub fn build(
        &self,
        base_params: Option<&ParamsFile>,
        cw_override: Option<f64>,
    ) -> Result<Scenario> {
        if self.wlans.is_empty() {
            return Err(Error::Scenario("scenario lists no WLANs".into()));
        }
        let params_file = self
            .params
            .clone()
            .or_else(|| base_params.cloned())
            .unwrap_or_default();
        let mut mac = params_file.mac_phy();
        if let Some(cw) = cw_override {
            mac.contention_window_slots = cw;
        }
        let model = ActivityModel::from_params(&mac, params_file.durations()?)?;
        let fit = params_file.fitted();

        let grid = ChannelGrid::new(self.channels)?;
        let mut allocations = Vec::with_capacity(self.wlans.len());
        let mut names = Vec::with_capacity(self.wlans.len());
        for spec in &self.wlans {
            allocations.push(WlanAllocation::parse(&spec.allocation, grid)?);
            names.push(spec.name.clone());
        }
        let net = NetworkAllocation::new(grid, allocations)?;

        let mut traffic = TrafficModel::homogeneous(&model, self.wlans.len());
        for (i, spec) in self.wlans.iter().enumerate() {
            if let Some(lambda) = spec.lambda {
                if lambda.is_nan() || lambda <= 0.0 {
                    return Err(Error::Scenario(format!(
                        "WLAN {} attempt rate must be positive",
                        spec.name
                    )));
                }
                traffic.wlans[i].attempt_rate = lambda;
            }
            if let Some(bits) = spec.payload_bits {
                if bits.is_nan() || bits <= 0.0 {
                    return Err(Error::Scenario(format!(
                        "WLAN {} payload must be positive",
                        spec.name
                    )));
                }
                traffic.wlans[i].payload_bits = bits;
            }
        }

        Ok(Scenario {
            net,
            traffic,
            names,
            model,
            fit,
        })
    }
}
