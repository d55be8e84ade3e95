//! Throughput-optimal channel allocation: continuous relaxations solved by
//! clamped water-filling, a branch-and-bound search over grouping schemes,
//! greedy and random baselines, exhaustive search and concavity
//! diagnostics.
//!
//! Two regimes are solved. With at most as many WLANs as channels the
//! variables are channels per WLAN (powers of two, total at most `K`) and
//! the relaxation objective replaces the tabulated activity ratio by the
//! fitted power law. With more WLANs than channels the variables are WLANs
//! per channel (positive integers summing to `N`) and the group-throughput
//! objective is already smooth, so it serves both as bound and as exact
//! objective.
//!
//! Branching pins the chosen variable to the rounded-down power of two (or
//! integer) of its relaxed value on one side and to the next power of two
//! (next integer) on the other; unpinned variables share the remaining
//! budget by water-filling. Integer-feasible nodes are scored with the
//! tabulated ratios and update the incumbent; fractional nodes carry fitted
//! bounds; over-budget nodes score zero.

use rand::Rng;
use rayon::prelude::*;

use crate::channels::{
    grouping_to_allocation_channels, grouping_to_allocation_wlans, overlap_metrics, BondedBlock,
    ChannelGrid, NetworkAllocation, WlanAllocation, BONDED_WIDTHS,
};
use crate::ctmc::{evaluate_allocation, EnumerationLimits, ThroughputReport, TrafficModel};
use crate::error::{Error, Result};
use crate::mac_phy::{ActivityModel, FittedActivityModel};

/// A channel-allocation problem: network size, grid size and the timing
/// models.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub num_wlans: usize,
    pub num_channels: u32,
    pub activity: ActivityModel,
    pub fit: FittedActivityModel,
}

impl ProblemInstance {
    pub fn new(num_wlans: usize, num_channels: u32) -> Result<Self> {
        Self::with_models(
            num_wlans,
            num_channels,
            ActivityModel::default(),
            FittedActivityModel::default(),
        )
    }

    pub fn with_models(
        num_wlans: usize,
        num_channels: u32,
        activity: ActivityModel,
        fit: FittedActivityModel,
    ) -> Result<Self> {
        if num_wlans == 0 {
            return Err(Error::Scenario("need at least one WLAN".into()));
        }
        ChannelGrid::new(num_channels)?;
        Ok(Self {
            num_wlans,
            num_channels,
            activity,
            fit,
        })
    }

    pub fn grid(&self) -> ChannelGrid {
        ChannelGrid::new(self.num_channels).expect("validated at construction")
    }

    /// The constant `A = lambda * L`, bits/s.
    pub fn rate_payload_product(&self) -> f64 {
        self.activity.lambda_l()
    }

    /// The single-channel activity ratio, the `B` constant of the
    /// WLANs-per-channel objective.
    pub fn single_channel_ratio(&self) -> Result<f64> {
        self.activity.activity_ratio(1)
    }
}

/// Whether a channels-per-WLAN scheme satisfies the width and budget
/// constraints.
pub fn channels_scheme_feasible(scheme: &[u32], num_channels: u32) -> bool {
    !scheme.is_empty()
        && scheme.iter().all(|k| BONDED_WIDTHS.contains(k))
        && scheme.iter().sum::<u32>() <= num_channels
}

/// Whether a WLANs-per-channel scheme covers all WLANs with nonempty groups.
pub fn wlans_scheme_feasible(scheme: &[u32], num_wlans: usize) -> bool {
    !scheme.is_empty()
        && scheme.iter().all(|&n| n >= 1)
        && scheme.iter().map(|&n| n as usize).sum::<usize>() == num_wlans
}

/// Aggregate throughput `sum A / (1 + rho(k_i))` of a channels-per-WLAN
/// scheme with the tabulated ratios, in bits/s. Infeasible schemes score 0.
///
/// Evaluation runs over the ascending-sorted scheme so permutations of one
/// multiset produce bit-identical values.
pub fn h_exact(instance: &ProblemInstance, scheme: &[u32]) -> f64 {
    if !channels_scheme_feasible(scheme, instance.num_channels) {
        return 0.0;
    }
    let mut sorted = scheme.to_vec();
    sorted.sort_unstable();
    let a = instance.rate_payload_product();
    let mut total = 0.0;
    for &k in &sorted {
        match instance.activity.activity_ratio(k) {
            Ok(rho) => total += a / (1.0 + rho),
            Err(_) => return 0.0,
        }
    }
    total
}

/// Relaxation objective `sum A / (1 + rho'(k_i))` with the fitted ratio at
/// every coordinate, fractional or integer, in bits/s.
pub fn h_fitted(instance: &ProblemInstance, scheme: &[f64]) -> Result<f64> {
    let a = instance.rate_payload_product();
    let mut total = 0.0;
    for &k in scheme {
        total += a / (1.0 + instance.fit.ratio(k)?);
    }
    Ok(total)
}

/// Aggregate group throughput `sum A n_k / (1 + B n_k)` in bits/s; real
/// (possibly fractional or zero) group sizes are accepted so the same
/// function scores relaxations and integer schemes.
pub fn g_exact(instance: &ProblemInstance, scheme: &[f64]) -> Result<f64> {
    let a = instance.rate_payload_product();
    let b = instance.single_channel_ratio()?;
    Ok(scheme.iter().map(|&n| a * n / (1.0 + b * n)).sum())
}

/// How much a fitted relaxation value must be inflated before it is a
/// sound upper bound on exact completions. The water-filled relaxation
/// dominates every completion coordinate-wise in fitted units, and
/// per-width the exact value exceeds the fitted one by at most
/// `max_k v(k)/v'(k)`, so scaling by that ratio restores soundness even
/// where the fitted ratio overshoots the tabulated one.
pub fn bound_safety_factor(instance: &ProblemInstance) -> f64 {
    let a = instance.rate_payload_product();
    let mut factor = 1.0f64;
    for &k in &BONDED_WIDTHS {
        let (Ok(rho), Ok(rho_fit)) = (
            instance.activity.activity_ratio(k),
            instance.fit.ratio(f64::from(k)),
        ) else {
            continue;
        };
        let exact = a / (1.0 + rho);
        let fitted = a / (1.0 + rho_fit);
        factor = factor.max(exact / fitted);
    }
    factor
}

/// A relaxation node: per-variable box constraints, the water-filled
/// solution and its objective value (an upper bound for every feasible
/// completion inside the box).
#[derive(Debug, Clone, PartialEq)]
pub struct BnbNode {
    pub lower_bounds: Vec<f64>,
    pub upper_bounds: Vec<f64>,
    pub relaxed_solution: Vec<f64>,
    pub relaxed_value: f64,
}

fn validate_boxes(boxes: &[(f64, f64)]) -> Result<()> {
    for &(l, u) in boxes {
        if l > u {
            return Err(Error::EmptyBox { lower: l, upper: u });
        }
    }
    Ok(())
}

/// Clamped water-filling: raises a common level `c` until
/// `sum clamp(c, l_i, u_i)` meets the target. With `equality` the target is
/// `budget` exactly, otherwise `min(budget, sum u_i)`.
fn water_fill(boxes: &[(f64, f64)], budget: f64, equality: bool) -> Result<Vec<f64>> {
    validate_boxes(boxes)?;
    let sum_l: f64 = boxes.iter().map(|b| b.0).sum();
    let sum_u: f64 = boxes.iter().map(|b| b.1).sum();
    let target = if equality {
        if sum_l > budget + 1e-12 || sum_u < budget - 1e-12 {
            return Err(Error::InfeasibleBoxes(format!(
                "total must be {budget}, boxes admit [{sum_l}, {sum_u}]"
            )));
        }
        budget
    } else {
        if sum_l > budget + 1e-12 {
            return Err(Error::InfeasibleBoxes(format!(
                "lower bounds sum to {sum_l}, exceeding the budget {budget}"
            )));
        }
        budget.min(sum_u)
    };

    let mut lo = boxes.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let mut hi = boxes.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    let fill = |c: f64| -> f64 { boxes.iter().map(|&(l, u)| c.clamp(l, u)).sum() };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fill(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let level = 0.5 * (lo + hi);

    // Recompute the level of the unclamped variables exactly so rational
    // solutions come out exact.
    let eps = 1e-7;
    let mut clamped_sum = 0.0;
    let mut free = 0usize;
    for &(l, u) in boxes {
        if level <= l + eps {
            clamped_sum += l;
        } else if level >= u - eps {
            clamped_sum += u;
        } else {
            free += 1;
        }
    }
    let solution: Vec<f64> = if free > 0 {
        let v = (target - clamped_sum) / free as f64;
        let candidate: Vec<f64> = boxes
            .iter()
            .map(|&(l, u)| {
                if level <= l + eps {
                    l
                } else if level >= u - eps {
                    u
                } else {
                    v
                }
            })
            .collect();
        let ok = candidate
            .iter()
            .zip(boxes)
            .all(|(&x, &(l, u))| x >= l - 1e-9 && x <= u + 1e-9);
        let total: f64 = candidate.iter().sum();
        if ok && (total - target).abs() < 1e-9 {
            candidate
        } else {
            boxes.iter().map(|&(l, u)| level.clamp(l, u)).collect()
        }
    } else {
        boxes.iter().map(|&(l, u)| level.clamp(l, u)).collect()
    };
    Ok(solution)
}

/// Continuous relaxation of the channels-per-WLAN problem. Without boxes
/// this is the even split `K/N`; with boxes, water-filling subject to
/// `sum k <= K`.
pub fn relax_channels(instance: &ProblemInstance, boxes: Option<&[(f64, f64)]>) -> Result<BnbNode> {
    let n = instance.num_wlans;
    let k = f64::from(instance.num_channels);
    match boxes {
        None => {
            let even = k / n as f64;
            let solution = vec![even; n];
            let value = h_fitted(instance, &solution)?;
            Ok(BnbNode {
                lower_bounds: vec![f64::NEG_INFINITY; n],
                upper_bounds: vec![f64::INFINITY; n],
                relaxed_solution: solution,
                relaxed_value: value,
            })
        }
        Some(boxes) => {
            assert_eq!(boxes.len(), n);
            let solution = water_fill(boxes, k, false)?;
            let value = h_fitted(instance, &solution)?;
            Ok(BnbNode {
                lower_bounds: boxes.iter().map(|b| b.0).collect(),
                upper_bounds: boxes.iter().map(|b| b.1).collect(),
                relaxed_solution: solution,
                relaxed_value: value,
            })
        }
    }
}

/// Continuous relaxation of the WLANs-per-channel problem. Without boxes
/// this is the even split `N/K`; with boxes, water-filling subject to
/// `sum n = N` exactly.
pub fn relax_wlans(instance: &ProblemInstance, boxes: Option<&[(f64, f64)]>) -> Result<BnbNode> {
    let k = instance.num_channels as usize;
    let n = instance.num_wlans as f64;
    match boxes {
        None => {
            let even = n / k as f64;
            let solution = vec![even; k];
            let value = g_exact(instance, &solution)?;
            Ok(BnbNode {
                lower_bounds: vec![f64::NEG_INFINITY; k],
                upper_bounds: vec![f64::INFINITY; k],
                relaxed_solution: solution,
                relaxed_value: value,
            })
        }
        Some(boxes) => {
            assert_eq!(boxes.len(), k);
            let solution = water_fill(boxes, n, true)?;
            let value = g_exact(instance, &solution)?;
            Ok(BnbNode {
                lower_bounds: boxes.iter().map(|b| b.0).collect(),
                upper_bounds: boxes.iter().map(|b| b.1).collect(),
                relaxed_solution: solution,
                relaxed_value: value,
            })
        }
    }
}

/// One branched solution of the search: the schemes, flags and running
/// bounds mirror the solver's printed table (two rows per iteration).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub scheme: Vec<f64>,
    pub feasible: bool,
    /// Exact objective for feasible schemes, fitted bound for fractional
    /// ones, zero for over-budget ones; bits/s.
    pub objective: f64,
    /// Best feasible value after this iteration, bits/s.
    pub lower_bound: f64,
    /// Highest open relaxation value after this iteration, bits/s.
    pub upper_bound: f64,
}

/// Outcome of a branch-and-bound run.
#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult {
    /// Optimal grouping scheme, canonically sorted ascending.
    pub best_scheme: Vec<u32>,
    /// Exact objective of the best scheme, bits/s.
    pub best_value: f64,
    pub trace: Vec<TraceRow>,
    /// Number of relaxations solved (root plus every branched child).
    pub nodes_explored: usize,
}

#[derive(Debug)]
enum NodeStatus {
    /// Pin total exceeds the budget (or leaves no room for the free
    /// variables); displayed with the free variables at their minimum.
    Invalid(Vec<f64>),
    Integer(Vec<u32>),
    Fractional {
        solution: Vec<f64>,
        bound: f64,
    },
}

fn is_near_integer(x: f64) -> Option<u32> {
    let r = x.round();
    if (x - r).abs() < 1e-9 && r >= 0.0 {
        Some(r as u32)
    } else {
        None
    }
}

struct BnbDriver<'a> {
    instance: &'a ProblemInstance,
    /// Channels-per-WLAN regime when true, WLANs-per-channel otherwise.
    channels_regime: bool,
    /// Pruning inflation for fitted bounds; 1 in the groups regime where
    /// the bound function is the exact objective.
    bound_safety: f64,
    vars: usize,
    trace: Vec<TraceRow>,
    incumbent_value: f64,
    incumbent_scheme: Option<Vec<u32>>,
    lower: f64,
    upper: f64,
    nodes_explored: usize,
}

impl<'a> BnbDriver<'a> {
    fn free_box(&self) -> (f64, f64) {
        if self.channels_regime {
            (1.0, 8.0)
        } else {
            (1.0, self.instance.num_wlans as f64)
        }
    }

    fn budget(&self) -> f64 {
        if self.channels_regime {
            f64::from(self.instance.num_channels)
        } else {
            self.instance.num_wlans as f64
        }
    }

    fn exact_value(&self, scheme: &[u32]) -> f64 {
        if self.channels_regime {
            h_exact(self.instance, scheme)
        } else {
            let floats: Vec<f64> = {
                let mut s = scheme.to_vec();
                s.sort_unstable();
                s.iter().map(|&v| f64::from(v)).collect()
            };
            g_exact(self.instance, &floats).expect("group sizes are positive")
        }
    }

    fn scheme_feasible(&self, scheme: &[u32]) -> bool {
        if self.channels_regime {
            channels_scheme_feasible(scheme, self.instance.num_channels)
        } else {
            wlans_scheme_feasible(scheme, self.instance.num_wlans)
        }
    }

    /// Solves the relaxation of a node given its pins.
    fn relax(&mut self, pins: &[Option<u32>]) -> Result<NodeStatus> {
        self.nodes_explored += 1;
        let (free_lo, free_hi) = self.free_box();
        let boxes: Vec<(f64, f64)> = pins
            .iter()
            .map(|p| match p {
                Some(v) => (f64::from(*v), f64::from(*v)),
                None => (free_lo, free_hi),
            })
            .collect();
        let lower_total: f64 = boxes.iter().map(|b| b.0).sum();
        let budget = self.budget();
        let over_budget = if self.channels_regime {
            lower_total > budget + 1e-9
        } else {
            // Equality constraint: pins must leave room for one WLAN per
            // free channel and must not fall short when nothing is free.
            let upper_total: f64 = boxes.iter().map(|b| b.1).sum();
            lower_total > budget + 1e-9 || upper_total < budget - 1e-9
        };
        if over_budget {
            return Ok(NodeStatus::Invalid(boxes.iter().map(|b| b.0).collect()));
        }
        let node = if self.channels_regime {
            relax_channels(self.instance, Some(&boxes))?
        } else {
            relax_wlans(self.instance, Some(&boxes))?
        };
        let solution = node.relaxed_solution;
        let ints: Option<Vec<u32>> = solution.iter().map(|&x| self.admissible_int(x)).collect();
        match ints {
            Some(scheme) if self.scheme_feasible(&scheme) => Ok(NodeStatus::Integer(scheme)),
            _ => Ok(NodeStatus::Fractional {
                bound: node.relaxed_value,
                solution,
            }),
        }
    }

    /// An admissible integer value for one variable: a bonded width in the
    /// channels regime, any nonnegative integer otherwise.
    fn admissible_int(&self, x: f64) -> Option<u32> {
        let v = is_near_integer(x)?;
        if self.channels_regime && !BONDED_WIDTHS.contains(&v) {
            return None;
        }
        Some(v)
    }

    fn offer_incumbent(&mut self, scheme: &[u32], value: f64) {
        let mut canonical = scheme.to_vec();
        canonical.sort_unstable();
        let better = match &self.incumbent_scheme {
            None => value > self.incumbent_value,
            Some(current) => {
                value > self.incumbent_value
                    || (value == self.incumbent_value && canonical < *current)
            }
        };
        if better {
            self.incumbent_value = value;
            self.incumbent_scheme = Some(canonical);
        }
    }

    fn emit(&mut self, iteration: usize, scheme: Vec<f64>, feasible: bool, objective: f64) {
        self.trace.push(TraceRow {
            iteration,
            scheme,
            feasible,
            objective,
            lower_bound: 0.0,
            upper_bound: 0.0,
        });
    }

    /// Applies the printed-bound bookkeeping: the lower bound is the
    /// incumbent; the upper bound is replaced by the iteration's best open
    /// relaxation value whenever one exceeds the incumbent.
    fn close_iteration(&mut self, iteration: usize, open_bounds: &[f64]) {
        self.lower = self.incumbent_value;
        if let Some(best) = open_bounds
            .iter()
            .cloned()
            .fold(None::<f64>, |acc, b| Some(acc.map_or(b, |a| a.max(b))))
        {
            if best > self.lower {
                self.upper = best;
            }
        }
        if self.upper < self.lower {
            self.upper = self.lower;
        }
        for row in self.trace.iter_mut().rev() {
            if row.iteration != iteration {
                break;
            }
            row.lower_bound = self.lower;
            row.upper_bound = self.upper;
        }
    }

    fn run(mut self, initial_scheme: Vec<u32>) -> Result<BnbResult> {
        let vars = self.vars;
        // Iteration 1: the initial incumbent candidate and the root
        // relaxation.
        let init_value = self.exact_value(&initial_scheme);
        let init_feasible = self.scheme_feasible(&initial_scheme);
        self.incumbent_value = init_value;
        if init_feasible {
            self.incumbent_scheme = Some(initial_scheme.clone());
        }
        self.emit(
            1,
            initial_scheme.iter().map(|&v| f64::from(v)).collect(),
            init_feasible,
            init_value,
        );

        let root_pins = vec![None; vars];
        let mut stack: Vec<(Vec<Option<u32>>, Vec<f64>, f64)> = Vec::new();
        let mut open = Vec::new();
        match self.relax(&root_pins)? {
            NodeStatus::Invalid(display) => {
                self.emit(1, display, false, 0.0);
            }
            NodeStatus::Integer(scheme) => {
                let value = self.exact_value(&scheme);
                self.emit(
                    1,
                    scheme.iter().map(|&v| f64::from(v)).collect(),
                    true,
                    value,
                );
                self.offer_incumbent(&scheme, value);
            }
            NodeStatus::Fractional { solution, bound } => {
                self.emit(1, solution.clone(), false, bound);
                open.push(bound);
                stack.push((root_pins, solution, bound));
            }
        }
        self.close_iteration(1, &open);

        let mut iteration = 1;
        while let Some((pins, solution, bound)) = stack.pop() {
            if bound * self.bound_safety <= self.incumbent_value {
                continue;
            }
            // Branch the first unpinned variable stuck at a non-admissible
            // value, in ascending index order.
            let branch_var = (0..vars)
                .find(|&i| pins[i].is_none() && self.admissible_int(solution[i]).is_none())
                .expect("fractional node has a branchable variable");
            let value = solution[branch_var];
            let (low_pin, high_pin) = if self.channels_regime {
                let mut p = 1u32;
                while p * 2 <= value.floor() as u32 {
                    p *= 2;
                }
                (p, p * 2)
            } else {
                (value.floor() as u32, value.floor() as u32 + 1)
            };

            iteration += 1;
            let mut children = Vec::new();
            let mut open_bounds = Vec::new();
            for pin in [low_pin, high_pin] {
                let mut child = pins.clone();
                child[branch_var] = Some(pin);
                match self.relax(&child)? {
                    NodeStatus::Invalid(display) => {
                        self.emit(iteration, display, false, 0.0);
                    }
                    NodeStatus::Integer(scheme) => {
                        let value = self.exact_value(&scheme);
                        self.emit(
                            iteration,
                            scheme.iter().map(|&v| f64::from(v)).collect(),
                            true,
                            value,
                        );
                        self.offer_incumbent(&scheme, value);
                    }
                    NodeStatus::Fractional { solution, bound } => {
                        self.emit(iteration, solution.clone(), false, bound);
                        open_bounds.push(bound);
                        if bound * self.bound_safety > self.incumbent_value {
                            children.push((child, solution, bound));
                        }
                    }
                }
            }
            self.close_iteration(iteration, &open_bounds);
            // Lower branch explored first.
            for child in children.into_iter().rev() {
                stack.push(child);
            }
        }

        let best_scheme = self
            .incumbent_scheme
            .expect("search always reaches a feasible scheme");
        Ok(BnbResult {
            best_value: self.incumbent_value,
            best_scheme,
            trace: self.trace,
            nodes_explored: self.nodes_explored,
        })
    }
}

/// Branch-and-bound over channels-per-WLAN schemes; requires `N <= K`.
pub fn bnb_channels(instance: &ProblemInstance) -> Result<BnbResult> {
    assert!(
        instance.num_wlans as u32 <= instance.num_channels,
        "channels regime needs N <= K"
    );
    let driver = BnbDriver {
        instance,
        channels_regime: true,
        bound_safety: bound_safety_factor(instance),
        vars: instance.num_wlans,
        trace: Vec::new(),
        incumbent_value: f64::NEG_INFINITY,
        incumbent_scheme: None,
        lower: f64::NEG_INFINITY,
        upper: f64::NEG_INFINITY,
        nodes_explored: 0,
    };
    driver.run(vec![1; instance.num_wlans])
}

/// Branch-and-bound over WLANs-per-channel schemes; requires `N > K`.
pub fn bnb_wlans(instance: &ProblemInstance) -> Result<BnbResult> {
    assert!(
        instance.num_wlans as u32 > instance.num_channels,
        "groups regime needs N > K"
    );
    let driver = BnbDriver {
        instance,
        channels_regime: false,
        bound_safety: 1.0,
        vars: instance.num_channels as usize,
        trace: Vec::new(),
        incumbent_value: f64::NEG_INFINITY,
        incumbent_scheme: None,
        lower: f64::NEG_INFINITY,
        upper: f64::NEG_INFINITY,
        nodes_explored: 0,
    };
    driver.run(vec![1; instance.num_channels as usize])
}

/// An optimized allocation together with its predicted performance.
#[derive(Debug, Clone)]
pub struct Optimized {
    pub allocation: NetworkAllocation,
    /// The grouping scheme behind the allocation, canonical ascending.
    pub scheme: Vec<u32>,
    pub bnb: BnbResult,
    /// Product-form evaluation of the allocation.
    pub report: ThroughputReport,
}

/// Solves the right regime for the instance and maps the optimal grouping
/// scheme onto an allocation; needs only the network and grid sizes plus
/// the timing parameters.
pub fn optimize(instance: &ProblemInstance) -> Result<Optimized> {
    let grid = instance.grid();
    let (bnb, allocation) = if instance.num_wlans as u32 <= instance.num_channels {
        let bnb = bnb_channels(instance)?;
        let mut widths = bnb.best_scheme.clone();
        widths.sort_unstable_by_key(|&w| std::cmp::Reverse(w));
        let allocation = grouping_to_allocation_channels(&widths, grid)?;
        (bnb, allocation)
    } else {
        let bnb = bnb_wlans(instance)?;
        let allocation = grouping_to_allocation_wlans(&bnb.best_scheme, instance.num_wlans, grid)?;
        (bnb, allocation)
    };
    let traffic = TrafficModel::homogeneous(&instance.activity, instance.num_wlans);
    let report = evaluate_allocation(&allocation, &traffic, &EnumerationLimits::default())?;
    Ok(Optimized {
        scheme: bnb.best_scheme.clone(),
        allocation,
        bnb,
        report,
    })
}

/// Greedy channels-per-WLAN baseline: visit WLANs in order and keep
/// doubling the current WLAN's channels (up to 8) while the budget allows;
/// over-budget doublings are skipped.
pub fn greedy_channels(instance: &ProblemInstance) -> Vec<u32> {
    let n = instance.num_wlans;
    let k = instance.num_channels;
    let mut scheme = vec![1u32; n];
    let mut total = n as u32;
    for width in scheme.iter_mut() {
        while *width < 8 && total + *width <= k {
            total += *width;
            *width *= 2;
        }
    }
    scheme
}

/// Greedy WLANs-per-channel baseline: the surplus WLANs all join the first
/// group.
pub fn greedy_wlans(instance: &ProblemInstance) -> Vec<u32> {
    let k = instance.num_channels as usize;
    let mut scheme = vec![1u32; k];
    scheme[0] = (instance.num_wlans - k + 1) as u32;
    scheme
}

/// Random baseline: every WLAN picks a uniform bonded block of the given
/// width; the block's first channel is its primary.
pub fn random_fixed_bw<R: Rng>(
    instance: &ProblemInstance,
    width: u32,
    rng: &mut R,
) -> Result<NetworkAllocation> {
    let grid = instance.grid();
    let blocks: Vec<BondedBlock> = grid
        .valid_blocks()
        .into_iter()
        .filter(|b| b.width() == width)
        .collect();
    if blocks.is_empty() {
        return Err(Error::NoBlockFits {
            width,
            channels: instance.num_channels,
        });
    }
    let allocations = (0..instance.num_wlans)
        .map(|_| {
            let block = blocks[rng.gen_range(0..blocks.len())];
            WlanAllocation::new(block, block.start())
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkAllocation::new(grid, allocations)
}

/// Random baseline with random widths: every WLAN first draws a width
/// uniformly from the bonded widths up to `bw_max` that fit the grid, then
/// a uniform block of that width.
pub fn random_variable_bw<R: Rng>(
    instance: &ProblemInstance,
    bw_max: u32,
    rng: &mut R,
) -> Result<NetworkAllocation> {
    let grid = instance.grid();
    let widths: Vec<u32> = BONDED_WIDTHS
        .iter()
        .copied()
        .filter(|&w| w <= bw_max && w <= instance.num_channels)
        .collect();
    if widths.is_empty() {
        return Err(Error::NoBlockFits {
            width: bw_max,
            channels: instance.num_channels,
        });
    }
    let all_blocks = grid.valid_blocks();
    let allocations = (0..instance.num_wlans)
        .map(|_| {
            let width = widths[rng.gen_range(0..widths.len())];
            let blocks: Vec<&BondedBlock> =
                all_blocks.iter().filter(|b| b.width() == width).collect();
            let block = *blocks[rng.gen_range(0..blocks.len())];
            WlanAllocation::new(block, block.start())
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkAllocation::new(grid, allocations)
}

/// Exhaustively evaluates every allocation vector (every bonded block and
/// every primary inside it, independently per WLAN) and returns an argmax
/// of the product-form aggregate throughput. Ties break toward the
/// smallest overlap degree, then lexicographically, so the result is
/// deterministic.
pub fn exhaustive_search(
    instance: &ProblemInstance,
    cap: u128,
) -> Result<(NetworkAllocation, f64)> {
    let grid = instance.grid();
    let mut candidates: Vec<WlanAllocation> = Vec::new();
    for block in grid.valid_blocks() {
        for primary in block.channels() {
            candidates.push(WlanAllocation::new(block, primary)?);
        }
    }
    let m = candidates.len() as u128;
    let n = instance.num_wlans;
    let size = m.checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }

    let traffic = TrafficModel::homogeneous(&instance.activity, n);
    let limits = EnumerationLimits::default();

    // (value, -overlap, reversed digits) ordered lexicographically picks the
    // highest value, then the least-overlapped, then the smallest digits.
    let best = (0..candidates.len())
        .into_par_iter()
        .map(|first| {
            let mut local_best: Option<(f64, usize, Vec<usize>)> = None;
            let mut digits = vec![0usize; n];
            digits[0] = first;
            loop {
                let allocations: Vec<WlanAllocation> =
                    digits.iter().map(|&d| candidates[d]).collect();
                let net = NetworkAllocation::new(grid, allocations).expect("valid candidates");
                let report = evaluate_allocation(&net, &traffic, &limits)
                    .expect("reference-scale state spaces");
                let overlap = overlap_metrics(&net).max_overlap;
                let entry = (report.aggregate, overlap, digits.clone());
                let replace = match &local_best {
                    None => true,
                    Some((v, o, d)) => {
                        entry.0 > *v
                            || (entry.0 == *v && (overlap < *o || (overlap == *o && entry.2 < *d)))
                    }
                };
                if replace {
                    local_best = Some(entry);
                }
                // Advance the remaining digits (the first is fixed).
                let mut pos = n - 1;
                loop {
                    if pos == 0 {
                        return local_best;
                    }
                    digits[pos] += 1;
                    if digits[pos] < candidates.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos -= 1;
                }
            }
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, b) => b,
                (a, None) => a,
                (Some(a), Some(b)) => {
                    let keep_a =
                        a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)));
                    Some(if keep_a { a } else { b })
                }
            },
        )
        .expect("at least one candidate allocation");

    let allocations: Vec<WlanAllocation> = best.2.iter().map(|&d| candidates[d]).collect();
    Ok((NetworkAllocation::new(grid, allocations)?, best.0))
}

/// Which objective a concavity check probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcaveObjective {
    /// The fitted channels-per-WLAN objective (domain `k in [1, 830]`,
    /// where the fitted ratio stays above one).
    FittedChannels,
    /// The WLANs-per-channel group objective (domain `n >= 1`).
    GroupThroughput,
}

/// Finite-difference curvature summary at sampled domain points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub samples: usize,
    /// Largest (most positive) diagonal second difference observed.
    pub max_second_difference: f64,
    /// Largest cross partial relative to the objective magnitude.
    pub max_cross_partial_ratio: f64,
    pub all_diagonals_negative: bool,
    pub cross_partials_vanish: bool,
}

/// Central-difference concavity check of an objective over random domain
/// points: every coordinate's second difference must be negative and every
/// cross partial must vanish relative to the objective value.
pub fn concavity_check(
    instance: &ProblemInstance,
    objective: ConcaveObjective,
    dims: usize,
    samples: usize,
    seed: u64,
) -> Result<ConcavityReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let domain = match objective {
        ConcaveObjective::FittedChannels => (1.0, 830.0),
        ConcaveObjective::GroupThroughput => (1.0, 100.0),
    };
    let eval = |x: &[f64]| -> Result<f64> {
        match objective {
            ConcaveObjective::FittedChannels => h_fitted(instance, x),
            ConcaveObjective::GroupThroughput => g_exact(instance, x),
        }
    };

    let mut max_second = f64::NEG_INFINITY;
    let mut max_cross = 0.0f64;
    for _ in 0..samples {
        let point: Vec<f64> = (0..dims)
            .map(|_| rng.gen_range(domain.0..domain.1))
            .collect();
        let value = eval(&point)?;
        for i in 0..dims {
            let h = 1e-3 * point[i];
            let mut plus = point.clone();
            plus[i] += h;
            let mut minus = point.clone();
            minus[i] -= h;
            let second = (eval(&plus)? - 2.0 * value + eval(&minus)?) / (h * h);
            max_second = max_second.max(second);
        }
        for i in 0..dims {
            for j in (i + 1)..dims {
                let hi = 1e-3 * point[i];
                let hj = 1e-3 * point[j];
                let mut pp = point.clone();
                pp[i] += hi;
                pp[j] += hj;
                let mut pm = point.clone();
                pm[i] += hi;
                pm[j] -= hj;
                let mut mp = point.clone();
                mp[i] -= hi;
                mp[j] += hj;
                let mut mm = point.clone();
                mm[i] -= hi;
                mm[j] -= hj;
                let cross = (eval(&pp)? - eval(&pm)? - eval(&mp)? + eval(&mm)?) / (4.0 * hi * hj);
                max_cross = max_cross.max(cross.abs() / value.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(ConcavityReport {
        samples,
        max_second_difference: max_second,
        max_cross_partial_ratio: max_cross,
        all_diagonals_negative: max_second < 0.0,
        cross_partials_vanish: max_cross < 1e-6,
    })
}
