//! Channel grid, bonded blocks, per-WLAN allocations, the dynamic-bonding
//! transmission-channel selection rule and overlap metrics.
//!
//! A *basic channel* is a 20 MHz channel; channels are indexed `1..=K`. A
//! *bonded block* is an aligned group of 1, 2, 4 or 8 basic channels forming
//! a 20/40/80/160 MHz transmission channel, with alignment anchored at
//! channel 1 (channel 1 starts every block family, matching the 5 GHz
//! channelization map). An allocation assigns one bonded block and one
//! primary channel inside it to each WLAN.
//!
//! Allocation literals use a tilde after the primary channel index:
//! `"1~2"` is channels 1–2 with primary 1, `"1,2,3~4"` is channels 1–4 with
//! primary 3, `"7~"` is the single channel 7.

use std::fmt;

use crate::error::{Error, Result};

/// Bonded-block widths allowed by the channelization, in basic channels.
pub const BONDED_WIDTHS: [u32; 4] = [1, 2, 4, 8];

/// Largest grid representable by the `u64` channel masks used throughout.
pub const MAX_GRID_CHANNELS: u32 = 64;

/// The grid of basic channels, indexed `1..=num_channels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelGrid {
    num_channels: u32,
}

impl ChannelGrid {
    pub fn new(num_channels: u32) -> Result<Self> {
        if num_channels == 0 {
            return Err(Error::InvalidGrid("need at least one channel".into()));
        }
        if num_channels > MAX_GRID_CHANNELS {
            return Err(Error::InvalidGrid(format!(
                "at most {MAX_GRID_CHANNELS} channels supported, got {num_channels}"
            )));
        }
        Ok(Self { num_channels })
    }

    pub fn num_channels(&self) -> u32 {
        self.num_channels
    }

    pub fn contains(&self, channel: u32) -> bool {
        channel >= 1 && channel <= self.num_channels
    }

    /// Every aligned block of width 1, 2, 4 or 8 that fits in the grid,
    /// sorted by (width, start).
    pub fn valid_blocks(&self) -> Vec<BondedBlock> {
        let mut blocks = Vec::new();
        for &width in &BONDED_WIDTHS {
            let mut start = 1;
            while start + width - 1 <= self.num_channels {
                blocks.push(BondedBlock(Span { start, width }));
                start += width;
            }
        }
        blocks
    }
}

/// A set of basic channels as a bitmask (bit `c - 1` is channel `c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ChannelSet(pub u64);

impl ChannelSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn from_channels<I: IntoIterator<Item = u32>>(channels: I) -> Self {
        let mut mask = 0u64;
        for c in channels {
            mask |= 1 << (c - 1);
        }
        Self(mask)
    }

    pub fn contains(&self, channel: u32) -> bool {
        self.0 & (1 << (channel - 1)) != 0
    }

    pub fn is_disjoint(&self, other: ChannelSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(&self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 & other.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn channels(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=64).filter(move |&c| self.contains(c))
    }
}

/// A contiguous run of basic channels occupied by a single transmission.
///
/// Unlike [`BondedBlock`] this carries no alignment or power-of-two
/// invariant; widths outside {1,2,4,8} only arise in
/// [`SelectionMode::RawContiguous`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: u32,
    pub width: u32,
}

impl Span {
    /// Last channel of the run, inclusive.
    pub fn end(&self) -> u32 {
        self.start + self.width - 1
    }

    pub fn contains(&self, channel: u32) -> bool {
        (self.start..=self.end()).contains(&channel)
    }

    pub fn channel_set(&self) -> ChannelSet {
        ChannelSet::from_channels(self.start..=self.end())
    }

    pub fn channels(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end()
    }
}

/// An aligned group of 1, 2, 4 or 8 basic channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BondedBlock(Span);

impl BondedBlock {
    pub fn new(start: u32, width: u32, grid: ChannelGrid) -> Result<Self> {
        if !BONDED_WIDTHS.contains(&width) {
            return Err(Error::InvalidBlock(format!(
                "width {width} not one of {BONDED_WIDTHS:?}"
            )));
        }
        if start == 0 || !(start - 1).is_multiple_of(width) {
            return Err(Error::InvalidBlock(format!(
                "block starting at {start} is not aligned for width {width}"
            )));
        }
        if start + width - 1 > grid.num_channels() {
            return Err(Error::InvalidBlock(format!(
                "block {start}..{} exceeds the {}-channel grid",
                start + width - 1,
                grid.num_channels()
            )));
        }
        Ok(Self(Span { start, width }))
    }

    pub fn span(&self) -> Span {
        self.0
    }

    pub fn start(&self) -> u32 {
        self.0.start
    }

    pub fn width(&self) -> u32 {
        self.0.width
    }

    pub fn end(&self) -> u32 {
        self.0.end()
    }

    pub fn contains(&self, channel: u32) -> bool {
        self.0.contains(channel)
    }

    pub fn channel_set(&self) -> ChannelSet {
        self.0.channel_set()
    }

    pub fn channels(&self) -> impl Iterator<Item = u32> {
        self.0.channels()
    }

    /// Bandwidth in MHz (20 MHz per basic channel).
    pub fn bandwidth_mhz(&self) -> f64 {
        20.0 * f64::from(self.0.width)
    }
}

/// How the transmission channels are chosen at backoff expiry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Widest idle *aligned* block (width 1/2/4/8) containing the primary.
    #[default]
    Aligned,
    /// Widest idle contiguous run containing the primary, with no width or
    /// alignment constraint. Exploration mode only; the tabulated duration
    /// model covers widths {1,2,4,8}, so other widths need a custom table.
    RawContiguous,
}

/// One WLAN's assigned bonded block and primary channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WlanAllocation {
    block: BondedBlock,
    primary: u32,
}

impl WlanAllocation {
    pub fn new(block: BondedBlock, primary: u32) -> Result<Self> {
        if !block.contains(primary) {
            return Err(Error::InvalidBlock(format!(
                "primary channel {primary} is outside block {}..{}",
                block.start(),
                block.end()
            )));
        }
        Ok(Self { block, primary })
    }

    /// Parses an allocation literal such as `"1~2,3,4"` or `"7~"`.
    ///
    /// The literal lists the block's channels in ascending order; the
    /// separator after the primary channel is `~` instead of `,` (a trailing
    /// `~` marks the last channel as primary).
    pub fn parse(literal: &str, grid: ChannelGrid) -> Result<Self> {
        let err = |reason: &str| Error::ParseAllocation {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let mut channels: Vec<u32> = Vec::new();
        let mut primary: Option<u32> = None;
        let mut chars = literal.trim().chars().peekable();
        loop {
            let mut digits = String::new();
            while let Some(c) = chars.peek().copied() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            if digits.is_empty() {
                return Err(err("expected a channel index"));
            }
            let channel: u32 = digits.parse().map_err(|_| err("channel index overflow"))?;
            channels.push(channel);
            if chars.peek() == Some(&'~') {
                chars.next();
                if primary.replace(channel).is_some() {
                    return Err(err("more than one primary marker"));
                }
            }
            match chars.peek() {
                None => break,
                Some(',') => {
                    chars.next();
                    if chars.peek().is_none() {
                        return Err(err("trailing comma"));
                    }
                }
                Some(c) if c.is_ascii_digit() => {}
                Some(c) => return Err(err(&format!("unexpected character `{c}`"))),
            }
        }
        let primary = primary.ok_or_else(|| err("no primary marker"))?;
        for pair in channels.windows(2) {
            if pair[1] != pair[0] + 1 {
                return Err(err("channels must be contiguous and ascending"));
            }
        }
        let start = channels[0];
        let width = channels.len() as u32;
        let block = BondedBlock::new(start, width, grid)?;
        Self::new(block, primary)
    }

    pub fn block(&self) -> BondedBlock {
        self.block
    }

    pub fn primary(&self) -> u32 {
        self.primary
    }

    pub fn channel_set(&self) -> ChannelSet {
        self.block.channel_set()
    }

    pub fn bandwidth_mhz(&self) -> f64 {
        self.block.bandwidth_mhz()
    }
}

impl fmt::Display for WlanAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = self.block.end();
        for c in self.block.channels() {
            write!(f, "{c}")?;
            if c == self.primary {
                write!(f, "~")?;
            } else if c < end {
                write!(f, ",")?;
            }
        }
        Ok(())
    }
}

/// The allocation vector of the whole network on a shared grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkAllocation {
    grid: ChannelGrid,
    allocations: Vec<WlanAllocation>,
}

impl NetworkAllocation {
    pub fn new(grid: ChannelGrid, allocations: Vec<WlanAllocation>) -> Result<Self> {
        if allocations.is_empty() {
            return Err(Error::Scenario("network needs at least one WLAN".into()));
        }
        for a in &allocations {
            if a.block().end() > grid.num_channels() {
                return Err(Error::InvalidBlock(format!(
                    "allocation {a} does not fit the {}-channel grid",
                    grid.num_channels()
                )));
            }
        }
        Ok(Self { grid, allocations })
    }

    /// Parses a list of allocation literals onto one grid.
    pub fn parse(k: u32, literals: &[&str]) -> Result<Self> {
        let grid = ChannelGrid::new(k)?;
        let allocations = literals
            .iter()
            .map(|s| WlanAllocation::parse(s, grid))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, allocations)
    }

    pub fn grid(&self) -> ChannelGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    pub fn allocations(&self) -> &[WlanAllocation] {
        &self.allocations
    }

    pub fn get(&self, wlan: usize) -> &WlanAllocation {
        &self.allocations[wlan]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, WlanAllocation> {
        self.allocations.iter()
    }
}

/// Selects the transmission channels at backoff expiry: the widest valid
/// block within the allocation that contains the primary channel and
/// overlaps no busy channel.
///
/// Fails with [`Error::PrimaryBusy`] if the primary channel is busy; a node
/// only reaches backoff expiry while its primary channel is idle.
pub fn dcb_select(alloc: &WlanAllocation, busy: ChannelSet) -> Result<BondedBlock> {
    let span = select_transmission(alloc, busy, SelectionMode::Aligned)?;
    Ok(BondedBlock(span))
}

/// [`dcb_select`] with an explicit selection mode; returns the occupied run.
pub fn select_transmission(
    alloc: &WlanAllocation,
    busy: ChannelSet,
    mode: SelectionMode,
) -> Result<Span> {
    let primary = alloc.primary();
    if busy.contains(primary) {
        return Err(Error::PrimaryBusy(primary));
    }
    let block = alloc.block();
    match mode {
        SelectionMode::Aligned => {
            // For each width there is exactly one aligned block containing
            // the primary; widths <= block width automatically nest inside
            // the (aligned) allocation block. Try widest first.
            for &width in BONDED_WIDTHS.iter().rev() {
                if width > block.width() {
                    continue;
                }
                let start = primary - (primary - 1) % width;
                let span = Span { start, width };
                debug_assert!(start >= block.start() && span.end() <= block.end());
                if span.channel_set().is_disjoint(busy) {
                    return Ok(span);
                }
            }
            unreachable!("width-1 block at the idle primary always qualifies")
        }
        SelectionMode::RawContiguous => {
            let mut lo = primary;
            while lo > block.start() && !busy.contains(lo - 1) {
                lo -= 1;
            }
            let mut hi = primary;
            while hi < block.end() && !busy.contains(hi + 1) {
                hi += 1;
            }
            Ok(Span {
                start: lo,
                width: hi - lo + 1,
            })
        }
    }
}

/// A maximal set of WLANs whose allocations pairwise intersect in the same
/// channel set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSet {
    /// WLAN indices in the set.
    pub wlans: Vec<usize>,
    /// The common pairwise intersection.
    pub channels: Vec<u32>,
}

/// Per-WLAN and network-wide overlap quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapReport {
    /// For WLAN i, the number of its channels shared with any other WLAN
    /// (the union of all pairwise intersections involving i).
    pub per_wlan_overlap: Vec<usize>,
    /// Maximum of the per-WLAN overlap counts.
    pub max_overlap: usize,
    pub overlap_sets: Vec<OverlapSet>,
}

/// Computes overlap counts and overlap sets for a network allocation.
pub fn overlap_metrics(net: &NetworkAllocation) -> OverlapReport {
    let n = net.len();
    let masks: Vec<ChannelSet> = net.iter().map(WlanAllocation::channel_set).collect();

    let mut per_wlan_overlap = vec![0usize; n];
    for i in 0..n {
        let mut shared = ChannelSet::empty();
        for j in 0..n {
            if i != j {
                shared = shared.union(masks[i].intersection(masks[j]));
            }
        }
        per_wlan_overlap[i] = shared.len();
    }
    let max_overlap = per_wlan_overlap.iter().copied().max().unwrap_or(0);

    // Group the overlapping pairs by their intersection, then take connected
    // components within each group: each component is a set of WLANs that
    // pairwise share the same channels.
    let mut by_intersection: Vec<(ChannelSet, Vec<(usize, usize)>)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let x = masks[i].intersection(masks[j]);
            if x.is_empty() {
                continue;
            }
            match by_intersection.iter_mut().find(|(m, _)| *m == x) {
                Some((_, pairs)) => pairs.push((i, j)),
                None => by_intersection.push((x, vec![(i, j)])),
            }
        }
    }
    let mut overlap_sets = Vec::new();
    for (x, pairs) in by_intersection {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for &(i, j) in &pairs {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
        let mut components: Vec<(usize, Vec<usize>)> = Vec::new();
        for &(i, j) in &pairs {
            for v in [i, j] {
                let root = find(&mut parent, v);
                match components.iter_mut().find(|(r, _)| *r == root) {
                    Some((_, members)) => {
                        if !members.contains(&v) {
                            members.push(v);
                        }
                    }
                    None => components.push((root, vec![v])),
                }
            }
        }
        for (_, mut members) in components {
            members.sort_unstable();
            overlap_sets.push(OverlapSet {
                wlans: members,
                channels: x.channels().collect(),
            });
        }
    }
    overlap_sets.sort_by(|a, b| a.wlans.cmp(&b.wlans));

    OverlapReport {
        per_wlan_overlap,
        max_overlap,
        overlap_sets,
    }
}

/// Maps a channels-per-WLAN grouping scheme onto disjoint bonded blocks,
/// the first channel of each block being that WLAN's primary.
///
/// Blocks are laid out left to right in order of decreasing width, which
/// keeps every block aligned (descending power-of-two prefix sums are
/// multiples of the next width); each WLAN keeps its requested width.
pub fn grouping_to_allocation_channels(
    scheme: &[u32],
    grid: ChannelGrid,
) -> Result<NetworkAllocation> {
    if scheme.is_empty() {
        return Err(Error::InfeasibleScheme("empty grouping scheme".into()));
    }
    for &k in scheme {
        if !BONDED_WIDTHS.contains(&k) {
            return Err(Error::InfeasibleScheme(format!(
                "channel count {k} is not one of {BONDED_WIDTHS:?}"
            )));
        }
    }
    let total: u32 = scheme.iter().sum();
    if total > grid.num_channels() {
        return Err(Error::InfeasibleScheme(format!(
            "scheme needs {total} channels but the grid has {}",
            grid.num_channels()
        )));
    }
    let mut order: Vec<usize> = (0..scheme.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(scheme[i]));
    let mut allocations = vec![None; scheme.len()];
    let mut start = 1;
    for &i in &order {
        let width = scheme[i];
        let block = BondedBlock::new(start, width, grid)?;
        allocations[i] = Some(WlanAllocation::new(block, start)?);
        start += width;
    }
    NetworkAllocation::new(grid, allocations.into_iter().map(Option::unwrap).collect())
}

/// Maps a WLANs-per-channel grouping scheme onto single-channel allocations:
/// the first `scheme[0]` WLANs share channel 1, the next `scheme[1]` share
/// channel 2, and so on.
pub fn grouping_to_allocation_wlans(
    scheme: &[u32],
    num_wlans: usize,
    grid: ChannelGrid,
) -> Result<NetworkAllocation> {
    if scheme.is_empty() {
        return Err(Error::InfeasibleScheme("empty grouping scheme".into()));
    }
    if scheme.contains(&0) {
        return Err(Error::InfeasibleScheme(
            "every channel group needs at least one WLAN".into(),
        ));
    }
    let total: usize = scheme.iter().map(|&n| n as usize).sum();
    if total != num_wlans {
        return Err(Error::InfeasibleScheme(format!(
            "scheme covers {total} WLANs but the network has {num_wlans}"
        )));
    }
    if scheme.len() as u32 > grid.num_channels() {
        return Err(Error::InfeasibleScheme(format!(
            "scheme uses {} channels but the grid has {}",
            scheme.len(),
            grid.num_channels()
        )));
    }
    let mut allocations = Vec::with_capacity(num_wlans);
    for (group, &count) in scheme.iter().enumerate() {
        let channel = group as u32 + 1;
        let block = BondedBlock::new(channel, 1, grid)?;
        for _ in 0..count {
            allocations.push(WlanAllocation::new(block, channel)?);
        }
    }
    NetworkAllocation::new(grid, allocations)
}
