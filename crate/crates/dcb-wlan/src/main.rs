//! Thin command-line front end over the library workflows.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcb_wlan::commands::{
    cmd_analyze, cmd_optimize, cmd_se_table, cmd_simulate, cmd_sweep, exit_code, AnalyzeOptions,
    CompareTarget, Method, Metric, OptimizeOptions, SimulateOptions, SweepSpec,
};
use dcb_wlan::error::Error;
use dcb_wlan::optim::ProblemInstance;
use dcb_wlan::scenario::{ParamsFile, Scenario, ScenarioFile};
use dcb_wlan::sim::{BackoffDistribution, SimConfig, TransmissionDistribution};

#[derive(Parser)]
#[command(
    name = "dcb",
    version,
    about = "CTMC modeling, simulation and optimal channel allocation for 802.11ac dynamic channel bonding"
)]
struct Cli {
    /// Parameter file (JSON) applied when a scenario has no inline params.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// State space, stationary distribution and throughput metrics of a scenario.
    Analyze(AnalyzeArgs),
    /// Discrete-event simulation of a scenario, optionally against the analytic values.
    Simulate(SimulateArgs),
    /// Compute a channel allocation for N WLANs on K channels.
    Optimize(OptimizeArgs),
    /// Sweep network sizes and methods, emitting long-format metric rows.
    Sweep(SweepArgs),
    /// Catalog of two-WLAN overlap patterns with closed-form and CTMC spectrum efficiency.
    SeTable,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Also solve the global balance equations and report the residual.
    #[arg(long)]
    exact: bool,
    /// Report the spectrum efficiency of the first overlap set.
    #[arg(long)]
    se: bool,
    /// Select transmission runs without the width/alignment constraint.
    #[arg(long)]
    raw_contiguous: bool,
    /// Refuse to enumerate more states than this.
    #[arg(long)]
    state_cap: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Simulated seconds per replication.
    #[arg(long, default_value_t = 100.0)]
    horizon: f64,
    /// Seconds discarded before counting (default 5% of the horizon).
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long, default_value_t = 30)]
    reps: u32,
    #[arg(long, default_value = "exponential")]
    backoff: String,
    #[arg(long, default_value = "exponential")]
    transmission: String,
    /// Contention-window override in slots.
    #[arg(long)]
    cw: Option<f64>,
    /// Add analytic columns: `product` or `exact`.
    #[arg(long)]
    compare: Option<String>,
    /// Exit nonzero when a mean relative error exceeds this percentage.
    #[arg(long)]
    assert_match: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    wlans: usize,
    #[arg(long)]
    channels: u32,
    /// bbm | greedy | random-fixed:`<w>` | random-var:`<w>` | exhaustive
    #[arg(long, default_value = "bbm")]
    method: String,
    /// Write the branch-and-bound trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Allocation-count cap for exhaustive search.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    channels: u32,
    /// WLAN range, e.g. `1..10` (inclusive).
    #[arg(long)]
    wlans: String,
    /// Comma-separated methods.
    #[arg(long, default_value = "bbm,greedy")]
    methods: String,
    /// Draws per random method.
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Comma-separated metrics: throughput, jfi, cu.
    #[arg(long, default_value = "throughput,jfi,cu")]
    metrics: String,
    /// Allocation-count cap for exhaustive search.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
}

fn load_scenario(
    path: &Path,
    params: Option<&ParamsFile>,
    cw: Option<f64>,
) -> Result<Scenario, Error> {
    ScenarioFile::from_path(path)?.build(params, cw)
}

fn parse_backoff(text: &str) -> Result<BackoffDistribution, Error> {
    match text {
        "exponential" => Ok(BackoffDistribution::Exponential),
        "uniform" => Ok(BackoffDistribution::Uniform),
        "deterministic" => Ok(BackoffDistribution::Deterministic),
        other => Err(Error::Scenario(format!(
            "unknown backoff distribution `{other}`"
        ))),
    }
}

fn parse_transmission(text: &str) -> Result<TransmissionDistribution, Error> {
    match text {
        "exponential" => Ok(TransmissionDistribution::Exponential),
        "deterministic" => Ok(TransmissionDistribution::Deterministic),
        other => Err(Error::Scenario(format!(
            "unknown transmission distribution `{other}`"
        ))),
    }
}

fn parse_range(text: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = text.split("..").collect();
    let bad = || Error::Scenario(format!("bad WLAN range `{text}`; expected e.g. 1..10"));
    match parts.as_slice() {
        [single] => {
            let n = single.parse().map_err(|_| bad())?;
            Ok((n, n))
        }
        [from, to] => {
            let from = from.parse().map_err(|_| bad())?;
            let to = to.parse().map_err(|_| bad())?;
            Ok((from, to))
        }
        _ => Err(bad()),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }
    let base_params = match &cli.params {
        Some(path) => Some(ParamsFile::from_path(path)?),
        None => None,
    };
    let emit = |text: &str| -> Result<(), Error> {
        match &cli.output {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    };

    match &cli.command {
        Command::Analyze(args) => {
            let scenario = load_scenario(&args.scenario, base_params.as_ref(), None)?;
            let opts = AnalyzeOptions {
                exact: args.exact,
                spectrum_efficiency: args.se,
                raw_contiguous: args.raw_contiguous,
                state_cap: args.state_cap,
            };
            emit(&cmd_analyze(&scenario, &opts)?)?;
            Ok(0)
        }
        Command::Simulate(args) => {
            let scenario = load_scenario(&args.scenario, base_params.as_ref(), args.cw)?;
            let compare = match args.compare.as_deref() {
                None => None,
                Some("product") => Some(CompareTarget::ProductForm),
                Some("exact") => Some(CompareTarget::Exact),
                Some(other) => {
                    return Err(Error::Scenario(format!("unknown compare target `{other}`")))
                }
            };
            let opts = SimulateOptions {
                cfg: SimConfig {
                    horizon: args.horizon,
                    warmup: args.warmup,
                    seed: cli.seed,
                    replications: args.reps,
                    backoff: parse_backoff(&args.backoff)?,
                    transmission: parse_transmission(&args.transmission)?,
                    ..Default::default()
                },
                compare,
                assert_match_pct: args.assert_match,
            };
            let out = cmd_simulate(&scenario, &opts)?;
            emit(&out.csv)?;
            Ok(if out.matched { 0 } else { 5 })
        }
        Command::Optimize(args) => {
            let params = base_params.clone().unwrap_or_default();
            let instance = ProblemInstance::with_models(
                args.wlans,
                args.channels,
                params.activity_model()?,
                params.fitted(),
            )?;
            let opts = OptimizeOptions {
                method: Method::parse(&args.method)?,
                seed: cli.seed,
                exhaustive_cap: args.cap,
                want_trace: args.trace.is_some(),
            };
            let out = cmd_optimize(&instance, &opts)?;
            if let (Some(path), Some(csv)) = (&args.trace, &out.trace_csv) {
                std::fs::write(path, csv)?;
            }
            emit(&out.summary)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let params = base_params.clone().unwrap_or_default();
            let (wlans_from, wlans_to) = parse_range(&args.wlans)?;
            let methods = args
                .methods
                .split(',')
                .map(Method::parse)
                .collect::<Result<Vec<_>, _>>()?;
            let metrics = args
                .metrics
                .split(',')
                .map(Metric::parse)
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SweepSpec {
                channels: args.channels,
                wlans_from,
                wlans_to,
                methods,
                draws: args.draws,
                metrics,
                seed: cli.seed,
                exhaustive_cap: args.cap,
                activity: params.activity_model()?,
                fit: params.fitted(),
            };
            let out = cmd_sweep(&spec)?;
            for notice in &out.notices {
                eprintln!("note: {notice}");
            }
            emit(&out.csv)?;
            Ok(0)
        }
        Command::SeTable => {
            let params = base_params.clone().unwrap_or_default();
            emit(&cmd_se_table(&params.activity_model()?)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
