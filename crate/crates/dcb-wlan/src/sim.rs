//! Continuous-time discrete-event simulation of the bonded-channel
//! contention process, used to validate the CTMC model.
//!
//! Each saturated WLAN draws a backoff whenever it is idle; the timer runs
//! only while the WLAN's primary channel is idle and is frozen with its
//! remaining time preserved otherwise. At expiry the WLAN transmits on the
//! channels the dynamic-bonding rule selects against the instantaneous busy
//! set, credits its payload on completion and immediately contends again.
//! Carrier-sensing gaps and propagation delay are collapsed to zero, so
//! collisions cannot occur; secondary-channel state is sampled at the
//! instant the timer expires.
//!
//! Replications run independently with per-replication seeds derived from
//! the base seed; identical configurations replay bit-identically.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution as RandDistribution, Exp, Uniform};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::channels::{select_transmission, ChannelSet, NetworkAllocation, SelectionMode, Span};
use crate::ctmc::TrafficModel;
use crate::error::Result;

/// Backoff-duration distribution (all with the configured mean).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackoffDistribution {
    #[default]
    Exponential,
    Uniform,
    Deterministic,
}

/// Transmission-duration distribution (with the tabulated mean per width).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransmissionDistribution {
    #[default]
    Exponential,
    Deterministic,
}

/// Simulation horizon, warmup, seeding and distribution choices.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Simulated seconds per replication.
    pub horizon: f64,
    /// Seconds discarded before counting; defaults to 5% of the horizon.
    pub warmup: Option<f64>,
    pub seed: u64,
    pub replications: u32,
    pub backoff: BackoffDistribution,
    pub transmission: TransmissionDistribution,
    /// Record the fraction of time spent in each network state.
    pub collect_time_in_state: bool,
    pub selection_mode: SelectionMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: 100.0,
            warmup: None,
            seed: 1,
            replications: 30,
            backoff: BackoffDistribution::Exponential,
            transmission: TransmissionDistribution::Exponential,
            collect_time_in_state: false,
            selection_mode: SelectionMode::Aligned,
        }
    }
}

impl SimConfig {
    pub fn effective_warmup(&self) -> f64 {
        self.warmup.unwrap_or(0.05 * self.horizon)
    }
}

/// Mean per-WLAN throughputs with confidence intervals, the raw
/// per-replication values and the optional time-in-state fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Mean per-WLAN throughput over replications, bits/s.
    pub per_wlan_throughput: Vec<f64>,
    /// 95% confidence half-width per WLAN (Student-t over replications).
    pub confidence_halfwidth: Vec<f64>,
    /// Per-replication, per-WLAN throughputs, bits/s.
    pub per_replication: Vec<Vec<f64>>,
    /// Mean fraction of time per state label, when collected.
    pub time_in_state: Option<HashMap<String, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    BackoffExpiry,
    TransmissionEnd,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    wlan: usize,
    epoch: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed so the BinaryHeap pops the earliest event; simultaneous
    // events are processed in ascending WLAN index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.wlan.cmp(&self.wlan))
    }
}

/// Per-replication outcome: per-WLAN throughputs plus raw state-time
/// accumulation keyed by the active set.
type ReplicationOutcome = (Vec<f64>, HashMap<Vec<(usize, Span)>, f64>);

#[derive(Debug, Clone, Copy)]
enum Phase {
    /// Backoff timer running; expires at the recorded time.
    Counting {
        expiry: f64,
    },
    /// Backoff frozen with this much time left; resumes when the primary
    /// channel goes idle.
    Frozen {
        remaining: f64,
    },
    Transmitting {
        span: Span,
    },
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep`, derived deterministically from the base seed.
pub fn replication_seed(seed: u64, rep: u32) -> u64 {
    splitmix64(seed ^ splitmix64(u64::from(rep).wrapping_add(1)))
}

struct Sampler {
    backoff: BackoffDistribution,
    transmission: TransmissionDistribution,
}

impl Sampler {
    fn backoff(&self, rng: &mut ChaCha12Rng, mean: f64) -> f64 {
        match self.backoff {
            BackoffDistribution::Exponential => {
                Exp::new(1.0 / mean).expect("positive rate").sample(rng)
            }
            BackoffDistribution::Uniform => Uniform::new(0.0, 2.0 * mean).sample(rng),
            BackoffDistribution::Deterministic => mean,
        }
    }

    fn transmission(&self, rng: &mut ChaCha12Rng, mean: f64) -> f64 {
        match self.transmission {
            TransmissionDistribution::Exponential => {
                Exp::new(1.0 / mean).expect("positive rate").sample(rng)
            }
            TransmissionDistribution::Deterministic => mean,
        }
    }
}

struct Replication<'a> {
    net: &'a NetworkAllocation,
    traffic: &'a TrafficModel,
    cfg: &'a SimConfig,
    rng: ChaCha12Rng,
    sampler: Sampler,
    phases: Vec<Phase>,
    epochs: Vec<u64>,
    events: BinaryHeap<Event>,
    busy: ChannelSet,
    bits: Vec<f64>,
    // Time-in-state bookkeeping.
    state_time: HashMap<Vec<(usize, Span)>, f64>,
    last_change: f64,
}

impl<'a> Replication<'a> {
    fn new(
        net: &'a NetworkAllocation,
        traffic: &'a TrafficModel,
        cfg: &'a SimConfig,
        rep: u32,
    ) -> Self {
        let n = net.len();
        Self {
            net,
            traffic,
            cfg,
            rng: ChaCha12Rng::seed_from_u64(replication_seed(cfg.seed, rep)),
            sampler: Sampler {
                backoff: cfg.backoff,
                transmission: cfg.transmission,
            },
            phases: Vec::with_capacity(n),
            epochs: vec![0; n],
            events: BinaryHeap::new(),
            busy: ChannelSet::empty(),
            bits: vec![0.0; n],
            state_time: HashMap::new(),
            last_change: 0.0,
        }
    }

    fn mean_backoff(&self, wlan: usize) -> f64 {
        1.0 / self.traffic.wlans[wlan].attempt_rate
    }

    fn primary_idle(&self, wlan: usize) -> bool {
        !self.busy.contains(self.net.get(wlan).primary())
    }

    fn push(&mut self, time: f64, wlan: usize, kind: EventKind) {
        self.events.push(Event {
            time,
            wlan,
            epoch: self.epochs[wlan],
            kind,
        });
    }

    fn record_state(&mut self, now: f64) {
        let warmup = self.cfg.effective_warmup();
        let from = self.last_change.max(warmup);
        let to = now.min(self.cfg.horizon);
        if to > from {
            let mut active: Vec<(usize, Span)> = self
                .phases
                .iter()
                .enumerate()
                .filter_map(|(w, p)| match p {
                    Phase::Transmitting { span } => Some((w, *span)),
                    _ => None,
                })
                .collect();
            active.sort_unstable_by_key(|&(w, _)| w);
            *self.state_time.entry(active).or_insert(0.0) += to - from;
        }
        self.last_change = now;
    }

    fn run(mut self) -> ReplicationOutcome {
        let n = self.net.len();
        for wlan in 0..n {
            let mean = self.mean_backoff(wlan);
            let d = self.sampler.backoff(&mut self.rng, mean);
            self.phases.push(Phase::Counting { expiry: d });
            self.push(d, wlan, EventKind::BackoffExpiry);
        }

        while let Some(event) = self.events.pop() {
            if event.time > self.cfg.horizon {
                break;
            }
            if event.epoch != self.epochs[event.wlan] {
                continue; // cancelled by a freeze
            }
            match event.kind {
                EventKind::BackoffExpiry => self.on_expiry(event.time, event.wlan),
                EventKind::TransmissionEnd => self.on_tx_end(event.time, event.wlan),
            }
        }
        if self.cfg.collect_time_in_state {
            self.record_state(self.cfg.horizon);
        }

        let measured = self.cfg.horizon - self.cfg.effective_warmup();
        let throughput = self.bits.iter().map(|b| b / measured).collect();
        (throughput, self.state_time)
    }

    fn on_expiry(&mut self, now: f64, wlan: usize) {
        debug_assert!(self.primary_idle(wlan), "timer ran with a busy primary");
        if self.cfg.collect_time_in_state {
            self.record_state(now);
        }
        let span = select_transmission(self.net.get(wlan), self.busy, self.cfg.selection_mode)
            .expect("primary idle at expiry");
        debug_assert!(span.channel_set().is_disjoint(self.busy));
        let width = span.width;
        let mean = self
            .traffic
            .durations
            .duration(width)
            .expect("duration tabulated for selected width");
        let duration = self.sampler.transmission(&mut self.rng, mean);

        self.busy = self.busy.union(span.channel_set());
        self.phases[wlan] = Phase::Transmitting { span };
        self.epochs[wlan] += 1;
        self.push(now + duration, wlan, EventKind::TransmissionEnd);

        // Freeze every counting WLAN whose primary the new run covers.
        for other in 0..self.net.len() {
            if other == wlan {
                continue;
            }
            if let Phase::Counting { expiry } = self.phases[other] {
                if span.contains(self.net.get(other).primary()) {
                    self.epochs[other] += 1;
                    self.phases[other] = Phase::Frozen {
                        remaining: expiry - now,
                    };
                }
            }
        }
    }

    fn on_tx_end(&mut self, now: f64, wlan: usize) {
        if self.cfg.collect_time_in_state {
            self.record_state(now);
        }
        let span = match self.phases[wlan] {
            Phase::Transmitting { span } => span,
            _ => unreachable!("transmission end without a transmission"),
        };
        self.busy = ChannelSet(self.busy.0 & !span.channel_set().0);
        if now > self.cfg.effective_warmup() {
            self.bits[wlan] +=
                self.traffic.wlans[wlan].payload_bits * (1.0 - self.traffic.packet_error_prob);
        }

        // The finished WLAN contends again immediately; its own primary is
        // idle since no other active run may cover it.
        let mean = self.mean_backoff(wlan);
        let d = self.sampler.backoff(&mut self.rng, mean);
        self.epochs[wlan] += 1;
        self.phases[wlan] = Phase::Counting { expiry: now + d };
        self.push(now + d, wlan, EventKind::BackoffExpiry);

        // Resume every frozen WLAN whose primary just went idle.
        for other in 0..self.net.len() {
            if let Phase::Frozen { remaining } = self.phases[other] {
                if self.primary_idle(other) {
                    self.epochs[other] += 1;
                    self.phases[other] = Phase::Counting {
                        expiry: now + remaining,
                    };
                    self.push(now + remaining, other, EventKind::BackoffExpiry);
                }
            }
        }
    }
}

/// Runs the configured replications and aggregates their throughputs.
pub fn simulate(
    net: &NetworkAllocation,
    traffic: &TrafficModel,
    cfg: &SimConfig,
) -> Result<SimResult> {
    assert_eq!(
        net.len(),
        traffic.num_wlans(),
        "allocation/traffic mismatch"
    );
    assert!(
        cfg.horizon > cfg.effective_warmup(),
        "horizon must exceed warmup"
    );
    let reps: Vec<ReplicationOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| Replication::new(net, traffic, cfg, rep).run())
        .collect();

    let n = net.len();
    let r = cfg.replications as f64;
    let per_replication: Vec<Vec<f64>> = reps.iter().map(|(th, _)| th.clone()).collect();
    let mut per_wlan_throughput = vec![0.0; n];
    for th in &per_replication {
        for (acc, v) in per_wlan_throughput.iter_mut().zip(th) {
            *acc += v / r;
        }
    }

    let confidence_halfwidth = if cfg.replications > 1 {
        let t = StudentsT::new(0.0, 1.0, r - 1.0)
            .expect("valid t distribution")
            .inverse_cdf(0.975);
        (0..n)
            .map(|w| {
                let mean = per_wlan_throughput[w];
                let var: f64 = per_replication
                    .iter()
                    .map(|th| (th[w] - mean).powi(2))
                    .sum::<f64>()
                    / (r - 1.0);
                t * (var / r).sqrt()
            })
            .collect()
    } else {
        vec![0.0; n]
    };

    let time_in_state = if cfg.collect_time_in_state {
        let names: Vec<String> = (0..n).map(default_name).collect();
        let measured = cfg.horizon - cfg.effective_warmup();
        let mut fractions: HashMap<String, f64> = HashMap::new();
        for (_, states) in &reps {
            for (active, time) in states {
                let label = label_of(active, &names);
                *fractions.entry(label).or_insert(0.0) += time / (measured * r);
            }
        }
        Some(fractions)
    } else {
        None
    };

    Ok(SimResult {
        per_wlan_throughput,
        confidence_halfwidth,
        per_replication,
        time_in_state,
    })
}

/// Default WLAN names A, B, ..., Z, W26, W27, ...
pub fn default_name(index: usize) -> String {
    if index < 26 {
        char::from(b'A' + index as u8).to_string()
    } else {
        format!("W{index}")
    }
}

fn label_of(active: &[(usize, Span)], names: &[String]) -> String {
    if active.is_empty() {
        return String::new();
    }
    active
        .iter()
        .map(|&(w, span)| format!("{}:{}w{}", names[w], span.start, span.width))
        .collect::<Vec<_>>()
        .join(";")
}

/// Per-configuration throughputs and their worst pairwise disagreement.
#[derive(Debug, Clone, PartialEq)]
pub struct InsensitivityReport {
    /// (backoff, transmission) choices and the per-WLAN mean throughputs.
    pub configurations: Vec<(BackoffDistribution, TransmissionDistribution, Vec<f64>)>,
    /// Max over WLANs and configuration pairs of |a-b| / mean(a,b).
    pub max_relative_deviation: f64,
}

/// Simulates the same network under several distribution choices and
/// reports how far the stationary throughputs spread.
pub fn insensitivity_check(
    net: &NetworkAllocation,
    traffic: &TrafficModel,
    cfg: &SimConfig,
    choices: &[(BackoffDistribution, TransmissionDistribution)],
) -> Result<InsensitivityReport> {
    assert!(choices.len() >= 2, "need at least two configurations");
    let mut configurations = Vec::with_capacity(choices.len());
    for &(backoff, transmission) in choices {
        let run_cfg = SimConfig {
            backoff,
            transmission,
            ..cfg.clone()
        };
        let result = simulate(net, traffic, &run_cfg)?;
        configurations.push((backoff, transmission, result.per_wlan_throughput));
    }
    let mut max_relative_deviation = 0.0f64;
    for i in 0..configurations.len() {
        for j in (i + 1)..configurations.len() {
            for (a, b) in configurations[i].2.iter().zip(&configurations[j].2) {
                let mid = 0.5 * (a + b);
                if mid > 0.0 {
                    max_relative_deviation = max_relative_deviation.max((a - b).abs() / mid);
                }
            }
        }
    }
    Ok(InsensitivityReport {
        configurations,
        max_relative_deviation,
    })
}
