//! Continuous-time Markov chain model of the bonded-channel contention
//! process: reachable state-space enumeration, the product-form stationary
//! distribution, an exact global-balance solution as a cross-check, and the
//! throughput/fairness/utilization metrics derived from them.
//!
//! A network state is the set of WLANs currently transmitting together with
//! the channel run each one occupies. The runs of distinct active WLANs are
//! pairwise disjoint, each run lies inside its WLAN's allocation and
//! contains its primary channel. Activations happen at the attempt rate and
//! occupy exactly the channels the dynamic-bonding rule selects against the
//! busy set; departures free one active run at the inverse of its mean
//! transmission duration.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::channels::{
    overlap_metrics, select_transmission, NetworkAllocation, SelectionMode, Span, WlanAllocation,
};
use crate::error::{Error, Result};
use crate::mac_phy::{ActivityModel, DurationTable};

/// One megabit per second, in bits per second.
pub const MBPS: f64 = 1e6;

/// Per-WLAN traffic parameters (heterogeneous rates and payloads are
/// supported even though the reference setups are homogeneous).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlanTraffic {
    /// Attempt rate `lambda_i`, 1/s.
    pub attempt_rate: f64,
    /// Aggregated payload `L_i`, bits.
    pub payload_bits: f64,
}

/// Traffic model for a whole network: per-WLAN attempt rates and payloads,
/// a shared duration table and the packet error probability.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    pub wlans: Vec<WlanTraffic>,
    pub durations: DurationTable,
    pub packet_error_prob: f64,
}

impl TrafficModel {
    /// All WLANs share the activity model's rate and payload.
    pub fn homogeneous(model: &ActivityModel, num_wlans: usize) -> Self {
        Self {
            wlans: vec![
                WlanTraffic {
                    attempt_rate: model.attempt_rate,
                    payload_bits: model.payload_bits,
                };
                num_wlans
            ],
            durations: model.durations.clone(),
            packet_error_prob: model.packet_error_prob,
        }
    }

    pub fn num_wlans(&self) -> usize {
        self.wlans.len()
    }

    /// Departure rate `mu(k') = 1 / T(k')`, 1/s.
    pub fn departure_rate(&self, width: u32) -> Result<f64> {
        Ok(1.0 / self.durations.duration(width)?)
    }

    /// Activity ratio of WLAN `wlan` transmitting on `width` channels.
    pub fn activity_ratio(&self, wlan: usize, width: u32) -> Result<f64> {
        Ok(self.wlans[wlan].attempt_rate * self.durations.duration(width)?)
    }
}

/// A feasible network state: the active (WLAN, occupied run) pairs, sorted
/// by WLAN index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NetworkState {
    active: Vec<(usize, Span)>,
}

impl NetworkState {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn active(&self) -> &[(usize, Span)] {
        &self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn contains_wlan(&self, wlan: usize) -> bool {
        self.active.iter().any(|&(w, _)| w == wlan)
    }

    pub fn busy_mask(&self) -> u64 {
        self.active
            .iter()
            .fold(0, |m, (_, span)| m | span.channel_set().0)
    }

    fn with(&self, wlan: usize, span: Span) -> Self {
        let mut active = self.active.clone();
        let pos = active.partition_point(|&(w, _)| w < wlan);
        active.insert(pos, (wlan, span));
        Self { active }
    }

    fn without(&self, index: usize) -> Self {
        let mut active = self.active.clone();
        active.remove(index);
        Self { active }
    }

    /// Compact label such as `A:1w2;B:3w2` (start channel, `w`, width).
    pub fn label(&self, names: &[String]) -> String {
        if self.active.is_empty() {
            return String::new();
        }
        self.active
            .iter()
            .map(|&(w, span)| format!("{}:{}w{}", names[w], span.start, span.width))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Whether a transition is a backoff-expiry activation or a departure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    Activation(usize),
    Departure(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
    pub kind: TransitionKind,
}

/// Caps for the enumeration and the dense linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationLimits {
    pub max_states: usize,
    pub max_exact_states: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_states: 1_000_000,
            max_exact_states: 10_000,
        }
    }
}

/// The reachable state space with its transition rates. State 0 is the
/// all-idle state; states are indexed in BFS discovery order with
/// activations generated in ascending WLAN order before departures.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub states: Vec<NetworkState>,
    pub transitions: Vec<Transition>,
    index: HashMap<NetworkState, usize>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, state: &NetworkState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Breadth-first closure of the reachable states from the all-idle state.
pub fn enumerate_state_space(
    net: &NetworkAllocation,
    traffic: &TrafficModel,
    mode: SelectionMode,
    limits: &EnumerationLimits,
) -> Result<StateSpace> {
    assert_eq!(
        net.len(),
        traffic.num_wlans(),
        "allocation/traffic mismatch"
    );
    let mut states = vec![NetworkState::empty()];
    let mut index = HashMap::from([(NetworkState::empty(), 0usize)]);
    let mut transitions = Vec::new();
    let mut head = 0;

    while head < states.len() {
        let state = states[head].clone();
        let busy = crate::channels::ChannelSet(state.busy_mask());

        // Activations, ascending WLAN index.
        for (wlan, alloc) in net.iter().enumerate() {
            if state.contains_wlan(wlan) || busy.contains(alloc.primary()) {
                continue;
            }
            let span = select_transmission(alloc, busy, mode)?;
            debug_assert!(span.channel_set().is_disjoint(busy));
            let target = state.with(wlan, span);
            let to = intern(&mut states, &mut index, target, limits)?;
            transitions.push(Transition {
                from: head,
                to,
                rate: traffic.wlans[wlan].attempt_rate,
                kind: TransitionKind::Activation(wlan),
            });
        }
        // Departures, ascending WLAN index.
        for (pos, &(wlan, span)) in state.active().iter().enumerate() {
            let target = state.without(pos);
            let to = intern(&mut states, &mut index, target, limits)?;
            transitions.push(Transition {
                from: head,
                to,
                rate: traffic.departure_rate(span.width)?,
                kind: TransitionKind::Departure(wlan),
            });
        }
        head += 1;
    }

    Ok(StateSpace {
        states,
        transitions,
        index,
    })
}

fn intern(
    states: &mut Vec<NetworkState>,
    index: &mut HashMap<NetworkState, usize>,
    state: NetworkState,
    limits: &EnumerationLimits,
) -> Result<usize> {
    if let Some(&i) = index.get(&state) {
        return Ok(i);
    }
    if states.len() >= limits.max_states {
        return Err(Error::StateSpaceTooLarge {
            cap: limits.max_states,
        });
    }
    let i = states.len();
    states.push(state.clone());
    index.insert(state, i);
    Ok(i)
}

/// Stationary probabilities over a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub probabilities: Vec<f64>,
}

impl Distribution {
    pub fn get(&self, state: usize) -> f64 {
        self.probabilities[state]
    }
}

/// Product-form stationary distribution: the weight of a state is the
/// product of the activity ratios of its active pairs, normalized over the
/// space.
pub fn product_form_distribution(
    space: &StateSpace,
    traffic: &TrafficModel,
) -> Result<Distribution> {
    let mut weights = Vec::with_capacity(space.len());
    for state in &space.states {
        let mut w = 1.0;
        for &(wlan, span) in state.active() {
            w *= traffic.activity_ratio(wlan, span.width)?;
        }
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    Ok(Distribution {
        probabilities: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Exact stationary distribution from the global balance equations
/// `pi Q = 0`, `sum pi = 1`, solved densely.
pub fn exact_distribution(space: &StateSpace, limits: &EnumerationLimits) -> Result<Distribution> {
    let n = space.len();
    if n > limits.max_exact_states {
        return Err(Error::StateSpaceTooLarge {
            cap: limits.max_exact_states,
        });
    }
    // Rows of `m` are balance equations for each state (transposed
    // generator); the last row is replaced by the normalization constraint.
    let mut m = DMatrix::<f64>::zeros(n, n);
    for t in &space.transitions {
        m[(t.to, t.from)] += t.rate;
        m[(t.from, t.from)] -= t.rate;
    }
    for col in 0..n {
        m[(n - 1, col)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let solution = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Scenario("singular generator matrix".into()))?;
    Ok(Distribution {
        probabilities: solution.iter().copied().collect(),
    })
}

/// Maximum absolute net probability flow over all states when the
/// product-form distribution is plugged into the global balance equations.
/// Zero (up to rounding) exactly when the product form solves the chain.
pub fn balance_residual(space: &StateSpace, traffic: &TrafficModel) -> Result<f64> {
    let pi = product_form_distribution(space, traffic)?;
    let mut net_flow = vec![0.0; space.len()];
    for t in &space.transitions {
        net_flow[t.to] += pi.get(t.from) * t.rate;
        net_flow[t.from] -= pi.get(t.from) * t.rate;
    }
    Ok(net_flow.iter().fold(0.0f64, |m, f| m.max(f.abs())))
}

/// Per-WLAN and aggregate throughputs plus the derived metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    /// Per-WLAN throughput, bits/s.
    pub per_wlan: Vec<f64>,
    /// Sum of the per-WLAN throughputs, bits/s.
    pub aggregate: f64,
    /// Jain's fairness index of the per-WLAN throughputs.
    pub jfi: f64,
    /// Fraction of basic channels allocated to at least one WLAN.
    pub channel_utilization: f64,
    /// Throughput per MHz of the first overlap set, when one exists.
    pub spectrum_efficiency: Option<f64>,
}

/// Throughput of each WLAN under a stationary distribution:
/// `Th_i = L_i * sum over states with i active of mu_i(k') pi_s * (1-p_e)`.
pub fn throughput(
    space: &StateSpace,
    dist: &Distribution,
    traffic: &TrafficModel,
    net: &NetworkAllocation,
) -> Result<ThroughputReport> {
    let mut per_wlan = vec![0.0; traffic.num_wlans()];
    for (s, state) in space.states.iter().enumerate() {
        let pi = dist.get(s);
        for &(wlan, span) in state.active() {
            per_wlan[wlan] += traffic.departure_rate(span.width)? * pi;
        }
    }
    for (wlan, th) in per_wlan.iter_mut().enumerate() {
        *th *= traffic.wlans[wlan].payload_bits * (1.0 - traffic.packet_error_prob);
    }
    build_report(per_wlan, net)
}

fn build_report(per_wlan: Vec<f64>, net: &NetworkAllocation) -> Result<ThroughputReport> {
    let aggregate = per_wlan.iter().sum();
    let jfi = jfi(&per_wlan)?;
    let channel_utilization = channel_utilization(net.grid().num_channels(), net.allocations());
    Ok(ThroughputReport {
        per_wlan,
        aggregate,
        jfi,
        channel_utilization,
        spectrum_efficiency: None,
    })
}

/// Evaluates an allocation end to end with the product-form distribution.
///
/// WLANs whose allocations share no channel evolve independently, so the
/// network is split into overlap-connected components and each component is
/// enumerated on its own; the joint chain is their product and the
/// per-WLAN throughputs combine exactly.
pub fn evaluate_allocation(
    net: &NetworkAllocation,
    traffic: &TrafficModel,
    limits: &EnumerationLimits,
) -> Result<ThroughputReport> {
    let n = net.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !net
                .get(i)
                .channel_set()
                .is_disjoint(net.get(j).channel_set())
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_of: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of.get(&r) {
            Some(&c) => components[c].push(i),
            None => {
                root_of.insert(r, components.len());
                components.push(vec![i]);
            }
        }
    }

    let mut per_wlan = vec![0.0; n];
    for members in &components {
        let allocations: Vec<WlanAllocation> = members.iter().map(|&i| *net.get(i)).collect();
        let sub_net = NetworkAllocation::new(net.grid(), allocations)?;
        let sub_traffic = TrafficModel {
            wlans: members.iter().map(|&i| traffic.wlans[i]).collect(),
            durations: traffic.durations.clone(),
            packet_error_prob: traffic.packet_error_prob,
        };
        let space = enumerate_state_space(&sub_net, &sub_traffic, SelectionMode::Aligned, limits)?;
        let dist = product_form_distribution(&space, &sub_traffic)?;
        let report = throughput(&space, &dist, &sub_traffic, &sub_net)?;
        for (local, &global) in members.iter().enumerate() {
            per_wlan[global] = report.per_wlan[local];
        }
    }
    build_report(per_wlan, net)
}

/// Jain's fairness index `(sum Th)^2 / (N * sum Th^2)`.
pub fn jfi(throughputs: &[f64]) -> Result<f64> {
    if throughputs.is_empty() {
        return Err(Error::AllZero);
    }
    let sum: f64 = throughputs.iter().sum();
    let sum_sq: f64 = throughputs.iter().map(|t| t * t).sum();
    if sum_sq == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(sum * sum / (throughputs.len() as f64 * sum_sq))
}

/// Fraction of basic channels allocated to at least one WLAN.
pub fn channel_utilization(num_channels: u32, allocations: &[WlanAllocation]) -> f64 {
    if allocations.is_empty() {
        return 0.0;
    }
    let occupied = allocations.iter().fold(0u64, |m, a| m | a.channel_set().0);
    occupied.count_ones() as f64 / f64::from(num_channels)
}

/// Rate of throughput increase `(new - old) / old`.
pub fn gain(th_new: f64, th_old: f64) -> Result<f64> {
    if th_old == 0.0 {
        return Err(Error::DivideByZero);
    }
    Ok((th_new - th_old) / th_old)
}

/// Throughput per MHz of an overlapped WLAN set: the set's aggregate
/// throughput divided by the total bandwidth of the union of the channels
/// allocated to its members, in bits/s/MHz.
pub fn spectrum_efficiency(
    wlan_set: &[usize],
    report: &ThroughputReport,
    net: &NetworkAllocation,
) -> Result<f64> {
    if wlan_set.is_empty() {
        return Err(Error::EmptySet);
    }
    let th: f64 = wlan_set.iter().map(|&i| report.per_wlan[i]).sum();
    let union = wlan_set
        .iter()
        .fold(0u64, |m, &i| m | net.get(i).channel_set().0);
    let bandwidth_mhz = 20.0 * union.count_ones() as f64;
    Ok(th / bandwidth_mhz)
}

/// [`spectrum_efficiency`] of the first overlap set of the allocation,
/// attached to the report; `None` if nothing overlaps.
pub fn attach_spectrum_efficiency(
    report: &mut ThroughputReport,
    net: &NetworkAllocation,
) -> Result<()> {
    let overlaps = overlap_metrics(net);
    report.spectrum_efficiency = match overlaps.overlap_sets.first() {
        Some(set) => Some(spectrum_efficiency(&set.wlans, report, net)?),
        None => None,
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelGrid;
    use crate::mac_phy::MacPhyParams;

    fn model() -> ActivityModel {
        ActivityModel::default()
    }

    fn fig3() -> NetworkAllocation {
        NetworkAllocation::parse(4, &["1,2~", "1,2,3~4"]).unwrap()
    }

    fn space_of(net: &NetworkAllocation) -> (StateSpace, TrafficModel) {
        let traffic = TrafficModel::homogeneous(&model(), net.len());
        let space = enumerate_state_space(
            net,
            &traffic,
            SelectionMode::Aligned,
            &EnumerationLimits::default(),
        )
        .unwrap();
        (space, traffic)
    }

    fn labels(space: &StateSpace, names: &[&str]) -> Vec<String> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        space.states.iter().map(|s| s.label(&names)).collect()
    }

    #[test]
    fn two_wlan_example_has_five_states() {
        let net = fig3();
        let (space, _) = space_of(&net);
        let mut got = labels(&space, &["A", "B"]);
        got.sort();
        let mut expected = vec![
            "".to_string(),
            "A:1w2".to_string(),
            "B:1w4".to_string(),
            "A:1w2;B:3w2".to_string(),
            "B:3w2".to_string(),
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn two_wlan_example_product_form() {
        let net = fig3();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let rho2 = model().activity_ratio(2).unwrap();
        let rho4 = model().activity_ratio(4).unwrap();
        let z = 1.0 + rho2 + rho2 + rho4 + rho2 * rho2;
        assert!((dist.get(0) - 1.0 / z).abs() < 1e-12);
        let names = vec!["A".to_string(), "B".to_string()];
        for (i, state) in space.states.iter().enumerate() {
            let expected = match state.label(&names).as_str() {
                "" => 1.0,
                "A:1w2" | "B:3w2" => rho2,
                "B:1w4" => rho4,
                "A:1w2;B:3w2" => rho2 * rho2,
                other => panic!("unexpected state {other}"),
            } / z;
            assert!((dist.get(i) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_sums_to_one_and_is_nonnegative() {
        for literals in [
            vec!["1~2", "3~4"],
            vec!["1~2,3,4", "1,2~", "3~4", "4~"],
            vec!["1~", "2~", "3~", "4~"],
        ] {
            let net = NetworkAllocation::parse(4, &literals).unwrap();
            let (space, traffic) = space_of(&net);
            let dist = product_form_distribution(&space, &traffic).unwrap();
            let total: f64 = dist.probabilities.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(dist.probabilities.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn identical_blocks_give_one_active_wlan_at_a_time() {
        let net =
            NetworkAllocation::parse(4, &["1~2,3,4", "1,2~3,4", "1,2,3~4", "1,2,3,4~"]).unwrap();
        let (space, _) = space_of(&net);
        assert_eq!(space.len(), 5);
    }

    #[test]
    fn disjoint_singles_enumerate_all_subsets() {
        let net = NetworkAllocation::parse(4, &["1~", "2~", "3~", "4~"]).unwrap();
        let (space, _) = space_of(&net);
        assert_eq!(space.len(), 16);
        // 2^N scaling on disjoint allocations.
        for n in 1..=6u32 {
            let literals: Vec<String> = (1..=n).map(|c| format!("{c}~")).collect();
            let refs: Vec<&str> = literals.iter().map(String::as_str).collect();
            let net = NetworkAllocation::parse(n, &refs).unwrap();
            let (space, _) = space_of(&net);
            assert_eq!(space.len(), 1usize << n);
        }
    }

    #[test]
    fn active_runs_are_pairwise_disjoint_in_every_state() {
        let net = NetworkAllocation::parse(4, &["1~2,3,4", "1,2~", "3~4", "4~"]).unwrap();
        let (space, _) = space_of(&net);
        for state in &space.states {
            let mut seen = 0u64;
            for &(_, span) in state.active() {
                assert_eq!(seen & span.channel_set().0, 0);
                seen |= span.channel_set().0;
            }
        }
    }

    #[test]
    fn state_cap_is_enforced() {
        let net = NetworkAllocation::parse(4, &["1~", "2~", "3~", "4~"]).unwrap();
        let traffic = TrafficModel::homogeneous(&model(), net.len());
        let limits = EnumerationLimits {
            max_states: 4,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_state_space(&net, &traffic, SelectionMode::Aligned, &limits),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn single_wlan_occupancy() {
        let net = NetworkAllocation::parse(1, &["1~"]).unwrap();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let rho1 = model().activity_ratio(1).unwrap();
        let on = space.states.iter().position(|s| !s.is_empty()).unwrap();
        assert!((dist.get(on) - rho1 / (1.0 + rho1)).abs() < 1e-9);
        assert!((dist.get(on) - 0.99416).abs() < 1e-5);
    }

    #[test]
    fn single_wlan_throughputs_match_reference_values() {
        for (literal, k, expected_mbps) in [("1~2", 2, 114.5927), ("1~2,3,4", 4, 162.9881)] {
            let net = NetworkAllocation::parse(k, &[literal]).unwrap();
            let (space, traffic) = space_of(&net);
            let dist = product_form_distribution(&space, &traffic).unwrap();
            let report = throughput(&space, &dist, &traffic, &net).unwrap();
            assert!(
                (report.per_wlan[0] / MBPS - expected_mbps).abs() < 1e-3,
                "{literal}: {}",
                report.per_wlan[0] / MBPS
            );
        }
    }

    #[test]
    fn identical_allocation_normalized_aggregate() {
        let net =
            NetworkAllocation::parse(4, &["1~2,3,4", "1,2~3,4", "1,2,3~4", "1,2,3,4~"]).unwrap();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let report = throughput(&space, &dist, &traffic, &net).unwrap();
        let normalized = report.aggregate / model().lambda_l();
        assert!((normalized - 0.0155).abs() < 5e-4);
    }

    #[test]
    fn exact_matches_product_form_on_reversible_topologies() {
        for literals in [
            vec!["1~2,3,4", "1,2~3,4", "1,2,3~4", "1,2,3,4~"],
            vec!["1~", "2~", "3~", "4~"],
        ] {
            let net = NetworkAllocation::parse(4, &literals).unwrap();
            let (space, traffic) = space_of(&net);
            let pf = product_form_distribution(&space, &traffic).unwrap();
            let exact = exact_distribution(&space, &EnumerationLimits::default()).unwrap();
            for i in 0..space.len() {
                assert!((pf.get(i) - exact.get(i)).abs() < 1e-12);
            }
            assert!(balance_residual(&space, &traffic).unwrap() < 1e-12);
        }
    }

    #[test]
    fn two_wlan_example_violates_global_balance() {
        // Outflow and inflow at the state where only the wide WLAN holds its
        // narrow fallback run differ by lambda * pi_empty under the product
        // form.
        let net = fig3();
        let (space, traffic) = space_of(&net);
        let pf = product_form_distribution(&space, &traffic).unwrap();
        let residual = balance_residual(&space, &traffic).unwrap();
        let expected = traffic.wlans[1].attempt_rate * pf.get(0);
        assert!(
            (residual - expected).abs() < 1e-9 * expected.max(1.0),
            "residual {residual}, expected {expected}"
        );
        let exact = exact_distribution(&space, &EnumerationLimits::default()).unwrap();
        let max_diff = (0..space.len())
            .map(|i| (pf.get(i) - exact.get(i)).abs())
            .fold(0.0f64, f64::max)
            / pf.probabilities.iter().cloned().fold(0.0f64, f64::max);
        assert!(max_diff > 1e-3, "distributions unexpectedly close");
    }

    #[test]
    fn disjoint_allocations_factorize() {
        let net = NetworkAllocation::parse(7, &["1~2", "3~4", "5~6"]).unwrap();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let report = throughput(&space, &dist, &traffic, &net).unwrap();
        let m = model();
        let isolated = m.lambda_l() / (1.0 + m.activity_ratio(2).unwrap());
        for th in &report.per_wlan {
            assert!(((th - isolated) / isolated).abs() < 1e-12);
        }
    }

    #[test]
    fn component_decomposition_matches_whole_space() {
        let net = NetworkAllocation::parse(7, &["1~2", "1~", "3~4", "5~6,7,8"]);
        // 5~6,7,8 is invalid (not aligned); use a valid mixed net instead.
        assert!(net.is_err());
        let net = NetworkAllocation::parse(8, &["1~2", "1~", "3~4", "5~6"]).unwrap();
        let traffic = TrafficModel::homogeneous(&model(), net.len());
        let limits = EnumerationLimits::default();
        let whole = {
            let space =
                enumerate_state_space(&net, &traffic, SelectionMode::Aligned, &limits).unwrap();
            let dist = product_form_distribution(&space, &traffic).unwrap();
            throughput(&space, &dist, &traffic, &net).unwrap()
        };
        let split = evaluate_allocation(&net, &traffic, &limits).unwrap();
        for (a, b) in whole.per_wlan.iter().zip(&split.per_wlan) {
            assert!(((a - b) / a).abs() < 1e-12);
        }
        assert!((whole.jfi - split.jfi).abs() < 1e-12);
    }

    #[test]
    fn jfi_examples() {
        let j = jfi(&[114.5927, 114.5927, 114.5927]).unwrap();
        assert!((j - 1.0).abs() < 1e-12);
        let j = jfi(&[162.9881, 114.5927, 62.2770]).unwrap();
        assert!((j - 0.8836).abs() < 1e-4);
        let j = jfi(&[5.0, 0.0, 0.0]).unwrap();
        assert!((j - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(jfi(&[0.0, 0.0]), Err(Error::AllZero)));
    }

    #[test]
    fn gain_examples() {
        let g = gain(162.9881, 114.5927).unwrap();
        assert!((g - 0.4223).abs() < 1e-3);
        // Loss of the narrow WLAN relative to the balanced scheme.
        let g = gain(62.2770, 114.5927).unwrap();
        assert!((g.abs() - 0.4565).abs() < 1e-3);
        assert!((gain(5.0, 5.0).unwrap()).abs() < 1e-15);
        assert!(matches!(gain(1.0, 0.0), Err(Error::DivideByZero)));
    }

    #[test]
    fn channel_utilization_examples() {
        let grid = ChannelGrid::new(7).unwrap();
        let net = crate::channels::grouping_to_allocation_channels(&[2, 2, 2], grid).unwrap();
        let cu = channel_utilization(7, net.allocations());
        assert!((cu - 6.0 / 7.0).abs() < 1e-12);
        let net = crate::channels::grouping_to_allocation_channels(&[4, 2, 1], grid).unwrap();
        let cu = channel_utilization(7, net.allocations());
        assert!((cu - 1.0).abs() < 1e-12);
        assert_eq!(channel_utilization(7, &[]), 0.0);
    }

    #[test]
    fn spectrum_efficiency_closed_forms() {
        let m = model();
        let rho1 = m.activity_ratio(1).unwrap();
        let rho2 = m.activity_ratio(2).unwrap();
        let a = m.lambda_l();

        // Two single-channel WLANs sharing one channel and primary.
        let net = NetworkAllocation::parse(4, &["1~", "1~"]).unwrap();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let report = throughput(&space, &dist, &traffic, &net).unwrap();
        let eta = spectrum_efficiency(&[0, 1], &report, &net).unwrap();
        let expected = 2.0 * a / (20.0 * (1.0 + 2.0 * rho1));
        assert!(((eta - expected) / expected).abs() < 1e-12);

        // Two 40 MHz WLANs on the same block and primary.
        let net = NetworkAllocation::parse(4, &["1~2", "1~2"]).unwrap();
        let (space, traffic) = space_of(&net);
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let report = throughput(&space, &dist, &traffic, &net).unwrap();
        let eta = spectrum_efficiency(&[0, 1], &report, &net).unwrap();
        let expected = 2.0 * a / (40.0 * (1.0 + 2.0 * rho2));
        assert!(((eta - expected) / expected).abs() < 1e-12);

        assert!(matches!(
            spectrum_efficiency(&[], &report, &net),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn heterogeneous_rates_are_respected() {
        let net = NetworkAllocation::parse(2, &["1~", "2~"]).unwrap();
        let m = model();
        let mut traffic = TrafficModel::homogeneous(&m, 2);
        traffic.wlans[1].attempt_rate *= 2.0;
        let space = enumerate_state_space(
            &net,
            &traffic,
            SelectionMode::Aligned,
            &EnumerationLimits::default(),
        )
        .unwrap();
        let dist = product_form_distribution(&space, &traffic).unwrap();
        let report = throughput(&space, &dist, &traffic, &net).unwrap();
        let rho = m.activity_ratio(1).unwrap();
        let expected0 = m.lambda_l() / (1.0 + rho);
        let expected1 = 2.0 * m.lambda_l() / (1.0 + 2.0 * rho);
        assert!(((report.per_wlan[0] - expected0) / expected0).abs() < 1e-12);
        assert!(((report.per_wlan[1] - expected1) / expected1).abs() < 1e-12);
    }

    #[test]
    fn packet_error_probability_scales_throughput() {
        let net = NetworkAllocation::parse(2, &["1~2", "1~2"]).unwrap();
        let params = MacPhyParams {
            packet_error_prob: 0.25,
            ..Default::default()
        };
        let m = ActivityModel::from_params(&params, DurationTable::default()).unwrap();
        let traffic = TrafficModel::homogeneous(&m, 2);
        let report = evaluate_allocation(&net, &traffic, &EnumerationLimits::default()).unwrap();
        let clean = evaluate_allocation(
            &net,
            &TrafficModel::homogeneous(&model(), 2),
            &EnumerationLimits::default(),
        )
        .unwrap();
        assert!(((report.aggregate - 0.75 * clean.aggregate) / clean.aggregate).abs() < 1e-12);
    }
}
