//! The analysis, simulation, optimization and sweep workflows behind the
//! command-line front end. Every command renders a deterministic CSV (or a
//! short text summary); floating-point fields use fixed 6-decimal precision
//! so outputs diff cleanly.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::catalog::{Ratios, SE_PATTERNS};
use crate::channels::SelectionMode;
use crate::ctmc::{
    attach_spectrum_efficiency, balance_residual, enumerate_state_space, evaluate_allocation,
    exact_distribution, product_form_distribution, spectrum_efficiency, throughput, Distribution,
    EnumerationLimits, ThroughputReport, TrafficModel, MBPS,
};
use crate::error::{Error, Result};
use crate::mac_phy::ActivityModel;
use crate::optim::{
    exhaustive_search, greedy_channels, greedy_wlans, optimize, random_fixed_bw,
    random_variable_bw, BnbResult, ProblemInstance,
};
use crate::scenario::Scenario;
use crate::sim::{simulate, SimConfig};

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    /// Add the exact global-balance distribution and the balance residual.
    pub exact: bool,
    /// Report the spectrum efficiency of the first overlap set.
    pub spectrum_efficiency: bool,
    /// Select transmission runs without the width/alignment constraint.
    pub raw_contiguous: bool,
    pub state_cap: Option<usize>,
}

/// State table, stationary distribution and throughput metrics of a
/// scenario as CSV.
pub fn cmd_analyze(scenario: &Scenario, opts: &AnalyzeOptions) -> Result<String> {
    let mut limits = EnumerationLimits::default();
    if let Some(cap) = opts.state_cap {
        limits.max_states = cap;
    }
    let mode = if opts.raw_contiguous {
        SelectionMode::RawContiguous
    } else {
        SelectionMode::Aligned
    };
    let space = enumerate_state_space(&scenario.net, &scenario.traffic, mode, &limits)?;
    let pf = product_form_distribution(&space, &scenario.traffic)?;
    let mut report = throughput(&space, &pf, &scenario.traffic, &scenario.net)?;
    if opts.spectrum_efficiency {
        attach_spectrum_efficiency(&mut report, &scenario.net)?;
    }

    let exact: Option<(Distribution, ThroughputReport, f64)> = if opts.exact {
        let dist = exact_distribution(&space, &limits)?;
        let exact_report = throughput(&space, &dist, &scenario.traffic, &scenario.net)?;
        let residual = balance_residual(&space, &scenario.traffic)?;
        Some((dist, exact_report, residual))
    } else {
        None
    };

    let mut out = String::new();
    if exact.is_some() {
        out.push_str("record,label,detail,value,value_exact\n");
    } else {
        out.push_str("record,label,detail,value\n");
    }
    for (i, state) in space.states.iter().enumerate() {
        let label = state.label(&scenario.names);
        match &exact {
            Some((dist, _, _)) => {
                let _ = writeln!(
                    out,
                    "state,{i},{label},{},{}",
                    f6(pf.get(i)),
                    f6(dist.get(i))
                );
            }
            None => {
                let _ = writeln!(out, "state,{i},{label},{}", f6(pf.get(i)));
            }
        }
    }
    for (w, name) in scenario.names.iter().enumerate() {
        let value = f6(report.per_wlan[w] / MBPS);
        match &exact {
            Some((_, er, _)) => {
                let _ = writeln!(
                    out,
                    "wlan,{name},throughput_mbps,{value},{}",
                    f6(er.per_wlan[w] / MBPS)
                );
            }
            None => {
                let _ = writeln!(out, "wlan,{name},throughput_mbps,{value}");
            }
        }
    }
    let summaries: Vec<(&str, f64, Option<f64>)> = vec![
        (
            "aggregate_mbps",
            report.aggregate / MBPS,
            exact.as_ref().map(|(_, er, _)| er.aggregate / MBPS),
        ),
        ("jfi", report.jfi, exact.as_ref().map(|(_, er, _)| er.jfi)),
        (
            "channel_utilization",
            report.channel_utilization,
            exact.as_ref().map(|(_, er, _)| er.channel_utilization),
        ),
    ];
    for (label, value, value_exact) in summaries {
        match value_exact {
            Some(ve) => {
                let _ = writeln!(out, "summary,{label},,{},{}", f6(value), f6(ve));
            }
            None => {
                let _ = writeln!(out, "summary,{label},,{}", f6(value));
            }
        }
    }
    if let Some(eta) = report.spectrum_efficiency {
        if exact.is_some() {
            let _ = writeln!(
                out,
                "summary,spectrum_efficiency_mbps_per_mhz,,{},",
                f6(eta / MBPS)
            );
        } else {
            let _ = writeln!(
                out,
                "summary,spectrum_efficiency_mbps_per_mhz,,{}",
                f6(eta / MBPS)
            );
        }
    }
    if let Some((_, _, residual)) = &exact {
        let _ = writeln!(out, "summary,balance_residual,,{},", f6(*residual));
    }
    Ok(out)
}

/// Which analytic reference a simulation is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareTarget {
    ProductForm,
    Exact,
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub cfg: SimConfig,
    pub compare: Option<CompareTarget>,
    /// Exit nonzero when a mean relative error exceeds this percentage.
    pub assert_match_pct: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub csv: String,
    /// False when an `assert_match_pct` bound was violated.
    pub matched: bool,
}

/// Per-replication and mean simulated throughputs as CSV, optionally
/// against the analytic values.
pub fn cmd_simulate(scenario: &Scenario, opts: &SimulateOptions) -> Result<SimulateOutput> {
    let result = simulate(&scenario.net, &scenario.traffic, &opts.cfg)?;

    let analytic: Option<Vec<f64>> = match opts.compare {
        None => None,
        Some(target) => {
            let limits = EnumerationLimits::default();
            let space = enumerate_state_space(
                &scenario.net,
                &scenario.traffic,
                opts.cfg.selection_mode,
                &limits,
            )?;
            let dist = match target {
                CompareTarget::ProductForm => product_form_distribution(&space, &scenario.traffic)?,
                CompareTarget::Exact => exact_distribution(&space, &limits)?,
            };
            Some(throughput(&space, &dist, &scenario.traffic, &scenario.net)?.per_wlan)
        }
    };

    let mut out = String::from(
        "replication,wlan,throughput_mbps,ci_halfwidth_mbps,analytic_mbps,rel_error\n",
    );
    for (r, rep) in result.per_replication.iter().enumerate() {
        for (w, name) in scenario.names.iter().enumerate() {
            let _ = writeln!(out, "{},{name},{},,,", r + 1, f6(rep[w] / MBPS));
        }
    }
    let mut matched = true;
    for (w, name) in scenario.names.iter().enumerate() {
        let mean = result.per_wlan_throughput[w];
        let ci = result.confidence_halfwidth[w];
        match &analytic {
            Some(reference) => {
                let rel = (mean - reference[w]).abs() / reference[w];
                if let Some(pct) = opts.assert_match_pct {
                    if rel * 100.0 > pct {
                        matched = false;
                    }
                }
                let _ = writeln!(
                    out,
                    "mean,{name},{},{},{},{}",
                    f6(mean / MBPS),
                    f6(ci / MBPS),
                    f6(reference[w] / MBPS),
                    f6(rel)
                );
            }
            None => {
                let _ = writeln!(out, "mean,{name},{},{},,", f6(mean / MBPS), f6(ci / MBPS));
            }
        }
    }
    Ok(SimulateOutput { csv: out, matched })
}

/// Allocation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bbm,
    Greedy,
    RandomFixed(u32),
    RandomVariable(u32),
    Exhaustive,
}

impl Method {
    pub fn parse(text: &str) -> Result<Self> {
        let parse_width = |spec: &str, name: &str| -> Result<u32> {
            spec.parse::<u32>()
                .map_err(|_| Error::Scenario(format!("bad width in method `{name}:{spec}`")))
        };
        if let Some(w) = text.strip_prefix("random-fixed:") {
            return Ok(Method::RandomFixed(parse_width(w, "random-fixed")?));
        }
        if let Some(w) = text.strip_prefix("random-var:") {
            return Ok(Method::RandomVariable(parse_width(w, "random-var")?));
        }
        match text {
            "bbm" => Ok(Method::Bbm),
            "greedy" => Ok(Method::Greedy),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(Error::Scenario(format!("unknown method `{other}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Method::Bbm => "bbm".into(),
            Method::Greedy => "greedy".into(),
            Method::RandomFixed(w) => format!("random-fixed:{w}"),
            Method::RandomVariable(w) => format!("random-var:{w}"),
            Method::Exhaustive => "exhaustive".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub method: Method,
    pub seed: u64,
    pub exhaustive_cap: u128,
    pub want_trace: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            method: Method::Bbm,
            seed: 1,
            exhaustive_cap: 10_000_000,
            want_trace: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeOutput {
    /// Text summary; the first line is the allocation literal list.
    pub summary: String,
    /// Table-style trace CSV when the method was branch-and-bound.
    pub trace_csv: Option<String>,
}

/// Renders a branch-and-bound trace as CSV.
pub fn trace_csv(result: &BnbResult) -> String {
    let mut out = String::from(
        "iteration,scheme,feasible,objective_mbps,lower_bound_mbps,upper_bound_mbps\n",
    );
    for row in &result.trace {
        let scheme = row
            .scheme
            .iter()
            .map(|&v| f6(v))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{scheme},{},{},{},{}",
            row.iteration,
            if row.feasible { "yes" } else { "no" },
            f6(row.objective / MBPS),
            f6(row.lower_bound / MBPS),
            f6(row.upper_bound / MBPS)
        );
    }
    out
}

/// Computes an allocation with the requested method and reports its
/// product-form metrics.
pub fn cmd_optimize(instance: &ProblemInstance, opts: &OptimizeOptions) -> Result<OptimizeOutput> {
    let traffic = TrafficModel::homogeneous(&instance.activity, instance.num_wlans);
    let limits = EnumerationLimits::default();
    let mut trace = None;

    let (net, report) = match opts.method {
        Method::Bbm => {
            let solved = optimize(instance)?;
            if opts.want_trace {
                trace = Some(trace_csv(&solved.bnb));
            }
            (solved.allocation, solved.report)
        }
        Method::Greedy => {
            let net = if instance.num_wlans as u32 <= instance.num_channels {
                crate::channels::grouping_to_allocation_channels(
                    &greedy_channels(instance),
                    instance.grid(),
                )?
            } else {
                crate::channels::grouping_to_allocation_wlans(
                    &greedy_wlans(instance),
                    instance.num_wlans,
                    instance.grid(),
                )?
            };
            let report = evaluate_allocation(&net, &traffic, &limits)?;
            (net, report)
        }
        Method::RandomFixed(width) => {
            let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
            let net = random_fixed_bw(instance, width, &mut rng)?;
            let report = evaluate_allocation(&net, &traffic, &limits)?;
            (net, report)
        }
        Method::RandomVariable(bw_max) => {
            let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
            let net = random_variable_bw(instance, bw_max, &mut rng)?;
            let report = evaluate_allocation(&net, &traffic, &limits)?;
            (net, report)
        }
        Method::Exhaustive => {
            let (net, _) = exhaustive_search(instance, opts.exhaustive_cap)?;
            let report = evaluate_allocation(&net, &traffic, &limits)?;
            (net, report)
        }
    };

    let literals: Vec<String> = net.iter().map(|a| a.to_string()).collect();
    let per_wlan: Vec<String> = report.per_wlan.iter().map(|&t| f6(t / MBPS)).collect();
    let mut summary = String::new();
    let _ = writeln!(summary, "{}", literals.join(" "));
    let _ = writeln!(summary, "aggregate_mbps={}", f6(report.aggregate / MBPS));
    let _ = writeln!(summary, "per_wlan_mbps={}", per_wlan.join(","));
    let _ = writeln!(summary, "jfi={}", f6(report.jfi));
    let _ = writeln!(
        summary,
        "channel_utilization={}",
        f6(report.channel_utilization)
    );
    Ok(OptimizeOutput {
        summary,
        trace_csv: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Throughput,
    Jfi,
    ChannelUtilization,
}

impl Metric {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "throughput" => Ok(Metric::Throughput),
            "jfi" => Ok(Metric::Jfi),
            "cu" => Ok(Metric::ChannelUtilization),
            other => Err(Error::Scenario(format!("unknown metric `{other}`"))),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Metric::Throughput => "throughput_mbps",
            Metric::Jfi => "jfi",
            Metric::ChannelUtilization => "cu",
        }
    }

    fn of(&self, report: &ThroughputReport) -> f64 {
        match self {
            Metric::Throughput => report.aggregate / MBPS,
            Metric::Jfi => report.jfi,
            Metric::ChannelUtilization => report.channel_utilization,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub channels: u32,
    pub wlans_from: usize,
    pub wlans_to: usize,
    pub methods: Vec<Method>,
    pub draws: usize,
    pub metrics: Vec<Metric>,
    pub seed: u64,
    pub exhaustive_cap: u128,
    pub activity: ActivityModel,
    pub fit: crate::mac_phy::FittedActivityModel,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub csv: String,
    /// Human-readable notices (e.g. exhaustive search skipped).
    pub notices: Vec<String>,
}

/// Long-format sweep over network sizes and methods: one row per
/// `(channels, wlans, method, metric)`. Random methods report means over
/// the configured number of draws; exhaustive search is skipped with a
/// notice when its cap would be exceeded.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    if spec.wlans_from == 0 || spec.wlans_from > spec.wlans_to {
        return Err(Error::Scenario("empty WLAN range".into()));
    }
    if spec.methods.is_empty() || spec.metrics.is_empty() {
        return Err(Error::Scenario(
            "need at least one method and metric".into(),
        ));
    }
    let limits = EnumerationLimits::default();
    let mut out = String::from("channels,wlans,method,metric,value\n");
    let mut notices = Vec::new();

    for n in spec.wlans_from..=spec.wlans_to {
        let instance =
            ProblemInstance::with_models(n, spec.channels, spec.activity.clone(), spec.fit)?;
        let traffic = TrafficModel::homogeneous(&spec.activity, n);
        for method in &spec.methods {
            let reports: Vec<ThroughputReport> = match method {
                Method::Bbm => vec![optimize(&instance)?.report],
                Method::Greedy => {
                    let net = if n as u32 <= spec.channels {
                        crate::channels::grouping_to_allocation_channels(
                            &greedy_channels(&instance),
                            instance.grid(),
                        )?
                    } else {
                        crate::channels::grouping_to_allocation_wlans(
                            &greedy_wlans(&instance),
                            n,
                            instance.grid(),
                        )?
                    };
                    vec![evaluate_allocation(&net, &traffic, &limits)?]
                }
                Method::Exhaustive => match exhaustive_search(&instance, spec.exhaustive_cap) {
                    Ok((net, _)) => vec![evaluate_allocation(&net, &traffic, &limits)?],
                    Err(Error::SearchSpaceTooLarge { size, cap }) => {
                        notices.push(format!(
                            "exhaustive search skipped for N={n}, K={}: {size} allocations exceed the cap of {cap}",
                            spec.channels
                        ));
                        continue;
                    }
                    Err(e) => return Err(e),
                },
                Method::RandomFixed(_) | Method::RandomVariable(_) => {
                    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed.wrapping_add(n as u64));
                    let mut reports = Vec::with_capacity(spec.draws);
                    for _ in 0..spec.draws {
                        let net = match method {
                            Method::RandomFixed(w) => random_fixed_bw(&instance, *w, &mut rng)?,
                            Method::RandomVariable(w) => {
                                random_variable_bw(&instance, *w, &mut rng)?
                            }
                            _ => unreachable!(),
                        };
                        reports.push(evaluate_allocation(&net, &traffic, &limits)?);
                    }
                    reports
                }
            };
            for metric in &spec.metrics {
                let mean = reports.iter().map(|r| metric.of(r)).sum::<f64>() / reports.len() as f64;
                let _ = writeln!(
                    out,
                    "{},{n},{},{},{}",
                    spec.channels,
                    method.label(),
                    metric.label(),
                    f6(mean)
                );
            }
        }
    }
    Ok(SweepOutput { csv: out, notices })
}

/// The catalog of two-WLAN overlap patterns: closed-form spectrum
/// efficiency next to the CTMC value, as CSV.
pub fn cmd_se_table(model: &ActivityModel) -> Result<String> {
    let ratios = Ratios::from_model(model)?;
    let a = model.lambda_l();
    let limits = EnumerationLimits::default();
    let mut out = String::from(
        "id,wlan_i,wlan_j,overlap_channels,closed_form_mbps_per_mhz,ctmc_mbps_per_mhz,rel_diff\n",
    );
    for pattern in &SE_PATTERNS {
        let closed = (pattern.eta)(ratios) * a;
        let net = crate::channels::NetworkAllocation::parse(4, &[pattern.wlan_i, pattern.wlan_j])?;
        let traffic = TrafficModel::homogeneous(model, 2);
        let report = evaluate_allocation(&net, &traffic, &limits)?;
        let ctmc = spectrum_efficiency(&[0, 1], &report, &net)?;
        let rel = (ctmc - closed).abs() / closed;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{rel:.3e}",
            pattern.id,
            pattern.wlan_i,
            pattern.wlan_j,
            pattern.overlap,
            f6(closed / MBPS),
            f6(ctmc / MBPS)
        );
    }
    Ok(out)
}

/// Convenience used by tests and examples: metrics of one allocation.
pub fn allocation_metrics(
    net: &crate::channels::NetworkAllocation,
    model: &ActivityModel,
) -> Result<ThroughputReport> {
    let traffic = TrafficModel::homogeneous(model, net.len());
    evaluate_allocation(net, &traffic, &EnumerationLimits::default())
}

// Re-exported so the binary can classify failures without reaching into
// module internals.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::ParseAllocation { .. } | Error::Json(_) => 2,
        Error::Scenario(_) => 2,
        Error::StateSpaceTooLarge { .. } | Error::SearchSpaceTooLarge { .. } => 4,
        Error::Io(_) => 1,
        _ => 3,
    }
}
