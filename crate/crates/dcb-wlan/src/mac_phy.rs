//! MAC/PHY parameters, transmission-duration table, activity ratios and the
//! fitted continuous activity-ratio model.
//!
//! The activity ratio `rho(k')` of a WLAN transmitting on `k'` bonded basic
//! channels is the mean transmission duration divided by the mean backoff
//! duration. The tabulated durations are inputs (preamble and header
//! overhead is not derivable from subcarrier counts alone); the fitted model
//! `rho'(k) = b / k^a` extends the table to fractional channel counts for
//! the continuous relaxations used by the allocation solver.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Contention and frame parameters of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct MacPhyParams {
    /// Payload bits per packet.
    pub packet_length_bits: f64,
    /// Packets aggregated into one transmission.
    pub aggregated_packets: f64,
    /// Contention window in slots.
    pub contention_window_slots: f64,
    /// Slot duration in seconds.
    pub slot_duration: f64,
    /// Packet error probability.
    pub packet_error_prob: f64,
}

impl Default for MacPhyParams {
    fn default() -> Self {
        Self {
            packet_length_bits: 12_000.0,
            aggregated_packets: 64.0,
            contention_window_slots: 16.0,
            slot_duration: 9e-6,
            packet_error_prob: 0.0,
        }
    }
}

impl MacPhyParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("packet_length_bits", self.packet_length_bits),
            ("aggregated_packets", self.aggregated_packets),
            ("contention_window_slots", self.contention_window_slots),
            ("slot_duration", self.slot_duration),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Scenario(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.packet_error_prob) {
            return Err(Error::Scenario(format!(
                "packet_error_prob must be in [0,1), got {}",
                self.packet_error_prob
            )));
        }
        Ok(())
    }

    /// Mean backoff duration `E[B] = CW * T_slot / 2` in seconds.
    pub fn mean_backoff(&self) -> f64 {
        self.contention_window_slots * self.slot_duration / 2.0
    }

    /// Attempt rate `lambda = 1 / E[B]` in 1/s.
    pub fn attempt_rate(&self) -> f64 {
        1.0 / self.mean_backoff()
    }

    /// Aggregated payload `L` in bits.
    pub fn payload_bits(&self) -> f64 {
        self.aggregated_packets * self.packet_length_bits
    }
}

/// Mean transmission duration per number of bonded basic channels, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationTable {
    entries: BTreeMap<u32, f64>,
}

impl DurationTable {
    /// Builds a table, requiring positive durations that strictly decrease
    /// as the channel count grows.
    pub fn new(entries: BTreeMap<u32, f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Scenario("duration table is empty".into()));
        }
        let mut prev: Option<f64> = None;
        for (&k, &t) in &entries {
            if k == 0 {
                return Err(Error::Scenario("duration table key 0 is invalid".into()));
            }
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Scenario(format!(
                    "duration for {k} channels must be positive, got {t}"
                )));
            }
            if let Some(p) = prev {
                if t >= p {
                    return Err(Error::Scenario(
                        "durations must strictly decrease with channel count".into(),
                    ));
                }
            }
            prev = Some(t);
        }
        Ok(Self { entries })
    }

    /// The 20/40/80/160 MHz durations of the reference parameter set:
    /// 12.26 / 6.63 / 4.64 / 3.52 ms for 1 / 2 / 4 / 8 basic channels.
    pub fn ieee80211ac() -> Self {
        let entries = BTreeMap::from([(1, 12.26e-3), (2, 6.63e-3), (4, 4.64e-3), (8, 3.52e-3)]);
        Self { entries }
    }

    /// Mean transmission duration for `width` bonded channels, seconds.
    pub fn duration(&self, width: u32) -> Result<f64> {
        self.entries
            .get(&width)
            .copied()
            .ok_or(Error::UnknownWidth(width))
    }

    pub fn widths(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&k, &t)| (k, t))
    }
}

impl Default for DurationTable {
    fn default() -> Self {
        Self::ieee80211ac()
    }
}

/// Backoff/transmission timing model shared by the CTMC engine, the
/// simulator and the allocation solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityModel {
    pub durations: DurationTable,
    /// Mean backoff duration `E[B]`, seconds.
    pub mean_backoff: f64,
    /// Attempt rate `lambda = 1/E[B]`, 1/s.
    pub attempt_rate: f64,
    /// Aggregated payload per transmission, bits.
    pub payload_bits: f64,
    pub packet_error_prob: f64,
}

impl ActivityModel {
    pub fn from_params(params: &MacPhyParams, durations: DurationTable) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            durations,
            mean_backoff: params.mean_backoff(),
            attempt_rate: params.attempt_rate(),
            payload_bits: params.payload_bits(),
            packet_error_prob: params.packet_error_prob,
        })
    }

    /// Activity ratio `rho(k') = T(k') / E[B]`.
    pub fn activity_ratio(&self, width: u32) -> Result<f64> {
        Ok(self.durations.duration(width)? / self.mean_backoff)
    }

    /// The constant `A = lambda * L` in bits/s.
    pub fn lambda_l(&self) -> f64 {
        self.attempt_rate * self.payload_bits
    }
}

impl Default for ActivityModel {
    fn default() -> Self {
        Self::from_params(&MacPhyParams::default(), DurationTable::default())
            .expect("default parameters are valid")
    }
}

/// Continuous activity-ratio model `rho'(k) = b / k^a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedActivityModel {
    /// Dimensionless exponent `a`.
    pub exponent: f64,
    /// Dimensionless scale `b`.
    pub scale: f64,
}

impl Default for FittedActivityModel {
    fn default() -> Self {
        Self {
            exponent: 0.7624,
            scale: 168.2,
        }
    }
}

impl FittedActivityModel {
    /// Evaluates `rho'(k) = b / k^a` at a (possibly fractional) channel
    /// count.
    pub fn ratio(&self, k: f64) -> Result<f64> {
        if k.is_nan() || k <= 0.0 {
            return Err(Error::NonPositiveWidth(k));
        }
        Ok(self.scale / k.powf(self.exponent))
    }
}

/// A power-law fit together with its quality over the fitted points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub model: FittedActivityModel,
    /// Pearson correlation between the tabulated and fitted ratios over the
    /// input points.
    pub correlation: f64,
}

impl PowerLawFit {
    /// Whether the fit meets the 0.98 correlation quality bar.
    pub fn is_acceptable(&self) -> bool {
        self.correlation >= 0.98
    }
}

/// Least-squares fit of `log rho = log b - a log k` over `(k, rho)` points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    for &(k, rho) in points {
        if k.is_nan() || rho.is_nan() || k <= 0.0 || rho <= 0.0 {
            return Err(Error::DegenerateFit(format!(
                "points must be positive, got ({k}, {rho})"
            )));
        }
    }
    let xs: Vec<f64> = points.iter().map(|&(k, _)| k.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let n = points.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all channel counts equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let model = FittedActivityModel {
        exponent: -slope,
        scale: intercept.exp(),
    };

    let fitted: Vec<f64> = points
        .iter()
        .map(|&(k, _)| model.scale / k.powf(model.exponent))
        .collect();
    let observed: Vec<f64> = points.iter().map(|&(_, r)| r).collect();
    let correlation = pearson(&observed, &fitted);

    Ok(PowerLawFit { model, correlation })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return if va == vb { 1.0 } else { 0.0 };
    }
    cov / (va * vb).sqrt()
}
