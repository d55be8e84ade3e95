//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by grid construction, allocation parsing, the CTMC engine,
/// the simulator and the allocation solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Channel grid size out of the supported range.
    #[error("invalid channel grid: {0}")]
    InvalidGrid(String),

    /// A bonded block violates width, alignment or grid-fit constraints.
    #[error("invalid bonded block: {0}")]
    InvalidBlock(String),

    /// An allocation literal could not be parsed.
    #[error("invalid allocation literal `{literal}`: {reason}")]
    ParseAllocation { literal: String, reason: String },

    /// Transmission-channel selection was requested while the primary
    /// channel is busy; a node only reaches backoff expiry when its primary
    /// channel is idle.
    #[error("primary channel {0} is busy")]
    PrimaryBusy(u32),

    /// A grouping scheme cannot be mapped onto the channel grid.
    #[error("infeasible grouping scheme: {0}")]
    InfeasibleScheme(String),

    /// No transmission duration is tabulated for this channel count.
    #[error("no transmission duration tabulated for {0} bonded channels")]
    UnknownWidth(u32),

    /// The fitted activity-ratio model only covers positive channel counts.
    #[error("channel count must be positive, got {0}")]
    NonPositiveWidth(f64),

    /// Power-law fitting needs at least two distinct abscissae.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// State-space enumeration exceeded the configured cap.
    #[error("state space exceeds cap of {cap} states")]
    StateSpaceTooLarge { cap: usize },

    /// Exhaustive allocation search exceeded the configured cap.
    #[error("search space of {size} allocations exceeds cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    /// Spectrum efficiency of an empty WLAN set is undefined.
    #[error("spectrum efficiency requested for an empty WLAN set")]
    EmptySet,

    /// Jain's fairness index of an all-zero throughput vector is undefined.
    #[error("fairness index undefined for all-zero throughputs")]
    AllZero,

    /// Relative gain against a zero reference throughput is undefined.
    #[error("gain undefined for zero reference throughput")]
    DivideByZero,

    /// A per-variable box constraint is empty.
    #[error("empty box constraint: lower {lower} > upper {upper}")]
    EmptyBox { lower: f64, upper: f64 },

    /// The box constraints admit no solution with the required total.
    #[error("box constraints admit no feasible solution: {0}")]
    InfeasibleBoxes(String),

    /// No valid bonded block of the requested width fits in the grid.
    #[error("no bonded block of width {width} fits in a grid of {channels} channels")]
    NoBlockFits { width: u32, channels: u32 },

    /// A scenario or parameter file is semantically invalid.
    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
