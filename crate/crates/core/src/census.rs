//! Exhaustive enumeration of on/off hidden-variable models over Wigner
//! symbol subsets with flat-singles predicates.
//!
//! A model is a subset of a declared symbol list ("on" symbols carry equal
//! probability, "off" symbols none), encoded as one bit per symbol.  The
//! scans count how many subsets give flat per-setting singles, and compare
//! the counts against the claimed values for these model families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol::{one_step_set, perfect_set, WignerSymbol};

/// Claimed flat-combination count for the perfect-symbol model family.
pub const PERFECT_CENSUS_TARGET: u64 = 25;

/// Claimed flat-combination count for the unconstrained one-step family
/// (2^12 − 13).
pub const ONE_STEP_CENSUS_TARGET: u64 = 4083;

/// Number of distinct three-deviation sequences from one symbol (6^3).
/// Multi-step censuses stay out of scope: after a few deviations the
/// sequence count dwarfs the 64 possible patterns, so any observed
/// anti-correlation would have washed out long before.
pub const THREE_STEP_SEQUENCE_COUNT: u32 = 6 * 6 * 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("shard count must be at least 1")]
    ZeroShards,
    #[error("scan range {start}..{end} is invalid for a universe of size {size}")]
    RangeOutOfBounds { start: u64, end: u64, size: u64 },
    #[error("partial ranges {first_start}..{first_end} and {second_start}..{second_end} overlap")]
    PartitionOverlap { first_start: u64, first_end: u64, second_start: u64, second_end: u64 },
    #[error("partial ranges leave {start}..{end} uncovered")]
    PartitionGap { start: u64, end: u64 },
    #[error("likelihood ratio is undefined when the unconstrained census has no flat combinations")]
    ZeroFreeFlatCount,
    #[error("unknown grouping {0:?}; expected \"by_parent_pair\"")]
    UnknownGrouping(String),
}

/// One bit per symbol of a declared ordered symbol list; bit set = "on".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSubsetCode(pub u32);

/// Which stations must show flat singles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatnessVariant {
    /// Equal per-setting on-counts at Alice's station only.
    AliceOnly,
    /// Equal per-setting on-counts at both stations, checked per side.
    BothSides,
}

impl fmt::Display for FlatnessVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatnessVariant::AliceOnly => "alice_only",
            FlatnessVariant::BothSides => "both_sides",
        })
    }
}

impl FromStr for FlatnessVariant {
    type Err = CensusError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "alice_only" => Ok(FlatnessVariant::AliceOnly),
            "both_sides" => Ok(FlatnessVariant::BothSides),
            other => Err(CensusError::UnknownGrouping(other.to_string())),
        }
    }
}

/// Flatness test applied to every subset.  `strict` demands exactly equal
/// per-setting on-counts; the relaxed form tolerates a spread of one count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessPredicate {
    pub variant: FlatnessVariant,
    pub strict: bool,
}

impl FlatnessPredicate {
    pub fn strict(variant: FlatnessVariant) -> Self {
        FlatnessPredicate { variant, strict: true }
    }
}

/// An ordered symbol list with precomputed per-position membership masks:
/// `masks[p]` has bit `i` set when `symbols[i]` reads "+" at position `p`.
#[derive(Debug, Clone)]
pub struct CensusUniverse {
    label: &'static str,
    symbols: Vec<WignerSymbol>,
    masks: [u32; 6],
}

impl CensusUniverse {
    fn from_symbols(label: &'static str, symbols: Vec<WignerSymbol>) -> Self {
        assert!(symbols.len() <= 32, "subset codes are 32-bit");
        let mut masks = [0u32; 6];
        for (i, symbol) in symbols.iter().enumerate() {
            for (position, mask) in masks.iter_mut().enumerate() {
                if symbol.code() >> position & 1 == 1 {
                    *mask |= 1 << i;
                }
            }
        }
        CensusUniverse { label, symbols, masks }
    }

    /// The 8 perfect anti-correlation symbols, ascending encoding.
    pub fn perfect() -> Self {
        Self::from_symbols("perfect", perfect_set().iter().collect())
    }

    /// The 24 one-step symbols, ascending encoding.
    pub fn one_step() -> Self {
        Self::from_symbols("one_step", one_step_set().iter().collect())
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    pub fn symbols(&self) -> &[WignerSymbol] {
        &self.symbols
    }

    /// Number of subset codes: 2^(symbol count).
    pub fn size(&self) -> u64 {
        1u64 << self.symbols.len()
    }
}

/// Per-setting on-counts at one station: popcount of code AND mask.
#[inline]
fn side_counts(universe: &CensusUniverse, code: u32, offset: usize) -> [u32; 3] {
    [
        (code & universe.masks[offset]).count_ones(),
        (code & universe.masks[offset + 1]).count_ones(),
        (code & universe.masks[offset + 2]).count_ones(),
    ]
}

#[inline]
fn side_is_flat(counts: [u32; 3], strict: bool) -> bool {
    if strict {
        counts[0] == counts[1] && counts[1] == counts[2]
    } else {
        let max = counts.iter().max().expect("nonempty");
        let min = counts.iter().min().expect("nonempty");
        max - min <= 1
    }
}

/// Whether the subset encoded by `code` shows flat singles under the
/// predicate.  `code` must lie below the universe size.
pub fn is_flat(universe: &CensusUniverse, code: SymbolSubsetCode, predicate: &FlatnessPredicate) -> bool {
    debug_assert!((code.0 as u64) < universe.size(), "code {} out of range", code.0);
    if !side_is_flat(side_counts(universe, code.0, 0), predicate.strict) {
        return false;
    }
    match predicate.variant {
        FlatnessVariant::AliceOnly => true,
        FlatnessVariant::BothSides => side_is_flat(side_counts(universe, code.0, 3), predicate.strict),
    }
}

/// Outcome of one census scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult {
    pub universe: String,
    pub universe_size: u64,
    pub flat_count: u64,
    pub flat_proportion: f64,
    pub predicate: FlatnessPredicate,
    pub partition_count: u32,
    /// Wall-clock seconds; omitted from reports when timing is suppressed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
    /// Reference count this scan is checked against, when one is claimed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_target: Option<bool>,
    /// Reference proportion, for scans whose claim is proportional.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_proportion: Option<f64>,
}

impl CensusResult {
    fn new(
        universe: &str,
        universe_size: u64,
        flat_count: u64,
        predicate: FlatnessPredicate,
        partition_count: u32,
        elapsed_s: f64,
        target_count: Option<u64>,
    ) -> Self {
        CensusResult {
            universe: universe.to_string(),
            universe_size,
            flat_count,
            flat_proportion: flat_count as f64 / universe_size as f64,
            predicate,
            partition_count,
            elapsed_s: Some(elapsed_s),
            target_count,
            matches_target: target_count.map(|t| t == flat_count),
            target_proportion: None,
        }
    }
}

/// A partial flat-count over one code range, `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartialCensus {
    pub start: u64,
    pub end: u64,
    pub flat_count: u64,
}

/// Counts flat subsets over the half-open code range `start..end`.
/// Partial counts over a partition of the universe sum exactly to the full
/// census regardless of how the range is split.
pub fn census_scan_partitioned(
    universe: &CensusUniverse,
    predicate: &FlatnessPredicate,
    start: u64,
    end: u64,
) -> Result<PartialCensus, CensusError> {
    if start > end || end > universe.size() {
        return Err(CensusError::RangeOutOfBounds { start, end, size: universe.size() });
    }
    let mut flat_count = 0u64;
    for code in start..end {
        if is_flat(universe, SymbolSubsetCode(code as u32), predicate) {
            flat_count += 1;
        }
    }
    Ok(PartialCensus { start, end, flat_count })
}

/// Merges partial counts, rejecting overlaps and gaps; the parts must
/// exactly cover `0..universe_size`.
pub fn merge_partials(
    universe_size: u64,
    partials: &[PartialCensus],
) -> Result<u64, CensusError> {
    let mut sorted: Vec<&PartialCensus> = partials.iter().collect();
    sorted.sort_by_key(|p| p.start);
    let mut cursor = 0u64;
    let mut total = 0u64;
    for (i, part) in sorted.iter().enumerate() {
        if part.start < cursor {
            let previous = sorted[i - 1];
            return Err(CensusError::PartitionOverlap {
                first_start: previous.start,
                first_end: previous.end,
                second_start: part.start,
                second_end: part.end,
            });
        }
        if part.start > cursor {
            return Err(CensusError::PartitionGap { start: cursor, end: part.start });
        }
        cursor = part.end;
        total += part.flat_count;
    }
    if cursor != universe_size {
        return Err(CensusError::PartitionGap { start: cursor, end: universe_size });
    }
    Ok(total)
}

fn scan_sharded(
    universe: &CensusUniverse,
    predicate: &FlatnessPredicate,
    shards: u32,
) -> Result<u64, CensusError> {
    if shards == 0 {
        return Err(CensusError::ZeroShards);
    }
    let size = universe.size();
    if shards == 1 {
        return Ok(census_scan_partitioned(universe, predicate, 0, size)?.flat_count);
    }
    let shards = shards.min(size.max(1) as u32);
    let chunk = size.div_ceil(shards as u64);
    let partials: Vec<PartialCensus> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards as u64)
            .map(|i| {
                let start = (i * chunk).min(size);
                let end = ((i + 1) * chunk).min(size);
                scope.spawn(move || census_scan_partitioned(universe, predicate, start, end))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("census worker panicked"))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    merge_partials(size, &partials)
}

/// Scans all 2^8 on/off combinations of the perfect symbols.
pub fn census_perfect(predicate: FlatnessPredicate) -> CensusResult {
    let universe = CensusUniverse::perfect();
    let started = Instant::now();
    let flat_count =
        census_scan_partitioned(&universe, &predicate, 0, universe.size()).expect("range valid").flat_count;
    CensusResult::new(
        universe.label(),
        universe.size(),
        flat_count,
        predicate,
        1,
        started.elapsed().as_secs_f64(),
        Some(PERFECT_CENSUS_TARGET),
    )
}

/// Scans all 2^24 on/off combinations of the one-step symbols, split over
/// `shards` worker threads.  The flat count is identical for every shard
/// count; only the timing changes.
pub fn census_one_step(
    predicate: FlatnessPredicate,
    shards: u32,
) -> Result<CensusResult, CensusError> {
    let universe = CensusUniverse::one_step();
    let started = Instant::now();
    let flat_count = scan_sharded(&universe, &predicate, shards)?;
    Ok(CensusResult::new(
        universe.label(),
        universe.size(),
        flat_count,
        predicate,
        shards,
        started.elapsed().as_secs_f64(),
        Some(ONE_STEP_CENSUS_TARGET),
    ))
}

/// How one-step symbols are tied together under the fairness constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingRule {
    /// Symbols sharing the same unordered pair of perfect parents toggle
    /// together.
    ByParentPair,
}

impl FromStr for GroupingRule {
    type Err = CensusError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "by_parent_pair" => Ok(GroupingRule::ByParentPair),
            other => Err(CensusError::UnknownGrouping(other.to_string())),
        }
    }
}

/// The one-step symbols partitioned by their unordered perfect-parent pair,
/// as bit masks over the one-step universe, in deterministic order.
pub fn parent_pair_groups(universe: &CensusUniverse) -> Vec<u32> {
    let perfect = perfect_set();
    let mut groups: BTreeMap<(u8, u8), u32> = BTreeMap::new();
    for (i, symbol) in universe.symbols().iter().enumerate() {
        let mut parents: Vec<u8> = symbol
            .one_step_neighbors()
            .intersection(perfect)
            .iter()
            .map(|p| p.code())
            .collect();
        parents.sort_unstable();
        let key = (parents[0], parents[1]);
        *groups.entry(key).or_insert(0) |= 1 << i;
    }
    groups.into_values().collect()
}

/// Census restricted to subset codes consistent with the grouping: member
/// groups are entirely on or entirely off.  The flat proportion is compared
/// against the proportion the same predicate yields on the perfect-symbol
/// census.
pub fn efa_group_census(
    rule: GroupingRule,
    predicate: FlatnessPredicate,
) -> Result<CensusResult, CensusError> {
    let GroupingRule::ByParentPair = rule;
    let universe = CensusUniverse::one_step();
    let groups = parent_pair_groups(&universe);
    let started = Instant::now();
    let mut flat_count = 0u64;
    for group_code in 0u32..1 << groups.len() {
        let mut code = 0u32;
        for (g, mask) in groups.iter().enumerate() {
            if group_code >> g & 1 == 1 {
                code |= mask;
            }
        }
        if is_flat(&universe, SymbolSubsetCode(code), &predicate) {
            flat_count += 1;
        }
    }
    let universe_size = 1u64 << groups.len();
    let mut result = CensusResult::new(
        "one_step_grouped_by_parent_pair",
        universe_size,
        flat_count,
        predicate,
        1,
        started.elapsed().as_secs_f64(),
        None,
    );
    let perfect = census_perfect(predicate);
    result.target_proportion = Some(perfect.flat_proportion);
    result.matches_target = Some(result.flat_proportion == perfect.flat_proportion);
    Ok(result)
}

/// (efa flat proportion) / (free flat proportion).
pub fn likelihood_ratio(efa: &CensusResult, free: &CensusResult) -> Result<f64, CensusError> {
    likelihood_ratio_from_counts(efa.flat_count, efa.universe_size, free.flat_count, free.universe_size)
}

/// Likelihood ratio from raw counts, for comparing claimed figures.
pub fn likelihood_ratio_from_counts(
    efa_flat: u64,
    efa_universe: u64,
    free_flat: u64,
    free_universe: u64,
) -> Result<f64, CensusError> {
    if free_flat == 0 {
        return Err(CensusError::ZeroFreeFlatCount);
    }
    let efa = efa_flat as f64 / efa_universe as f64;
    let free = free_flat as f64 / free_universe as f64;
    Ok(efa / free)
}
