//! Exact finite set algebra over the 64 Wigner symbols.
//!
//! A Wigner symbol records the counterfactual detection outcome ("+" click,
//! "−" no click) for two particles at three measurement settings each, in the
//! order `(R1a, R2a, R3a; R1b, R2b, R3b)`.  Symbols are encoded as the
//! integers 0..64 with bit `k` set when position `k` reads "+", positions
//! ordered `1a, 2a, 3a, 1b, 2b, 3b`.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of distinct Wigner symbols (2^6 outcome patterns).
pub const SYMBOL_COUNT: usize = 64;

/// Number of detector positions (two sides, three settings).
pub const POSITION_COUNT: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("symbol text must look like \"(+--,-++)\", got {0:?}")]
    Malformed(String),
    #[error("setting index must be 1, 2 or 3, got {0}")]
    SettingOutOfRange(u8),
    #[error("setting pair ({0},{1}) is outside the derivation; expected (1,3), (1,2) or (2,3)")]
    UnsupportedPair(u8, u8),
    #[error("symbol code must be below 64, got {0}")]
    CodeOutOfRange(u8),
}

/// Detector station: Alice holds particle `a`, Bob particle `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    fn offset(self) -> usize {
        match self {
            Side::Alice => 0,
            Side::Bob => 3,
        }
    }
}

/// Measurement setting index, restricted to 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(transparent)]
pub struct Setting(u8);

impl Setting {
    pub const ONE: Setting = Setting(1);
    pub const TWO: Setting = Setting(2);
    pub const THREE: Setting = Setting(3);

    pub fn new(index: u8) -> Result<Self, SymbolError> {
        if (1..=3).contains(&index) {
            Ok(Setting(index))
        } else {
            Err(SymbolError::SettingOutOfRange(index))
        }
    }

    /// 1-based index as written in the subscripts of the derivation.
    pub fn index(self) -> u8 {
        self.0
    }

    fn slot(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        Setting::new(raw).map_err(D::Error::custom)
    }
}

/// A joint choice of measurement settings, Alice's first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SettingPair {
    pub alice: Setting,
    pub bob: Setting,
}

impl SettingPair {
    pub const ONE_ONE: SettingPair = SettingPair { alice: Setting::ONE, bob: Setting::ONE };
    pub const ONE_TWO: SettingPair = SettingPair { alice: Setting::ONE, bob: Setting::TWO };
    pub const ONE_THREE: SettingPair = SettingPair { alice: Setting::ONE, bob: Setting::THREE };
    pub const TWO_THREE: SettingPair = SettingPair { alice: Setting::TWO, bob: Setting::THREE };

    pub fn new(alice: u8, bob: u8) -> Result<Self, SymbolError> {
        Ok(SettingPair { alice: Setting::new(alice)?, bob: Setting::new(bob)? })
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.alice.index(), self.bob.index())
    }
}

/// Direction of a single-position deviation from a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipClass {
    /// A detection is lost: "+" becomes "−".
    Loss,
    /// A detection appears: "−" becomes "+".
    Gain,
}

/// One single-bit deviation: which position flipped, in which direction,
/// and the resulting symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flip {
    pub side: Side,
    pub setting: Setting,
    pub class: FlipClass,
    pub result: WignerSymbol,
}

/// One of the 64 counterfactual outcome patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WignerSymbol(u8);

impl WignerSymbol {
    pub fn from_code(code: u8) -> Result<Self, SymbolError> {
        if (code as usize) < SYMBOL_COUNT {
            Ok(WignerSymbol(code))
        } else {
            Err(SymbolError::CodeOutOfRange(code))
        }
    }

    /// Integer encoding, 0..=63.
    pub fn code(self) -> u8 {
        self.0
    }

    fn bit(self, position: usize) -> bool {
        self.0 >> position & 1 == 1
    }

    /// Whether this pattern registers a detection at the given position.
    pub fn detects(self, side: Side, setting: Setting) -> bool {
        self.bit(side.offset() + setting.slot())
    }

    /// True iff every setting reads opposite outcomes on the two sides.
    pub fn is_perfect_anticorrelation(self) -> bool {
        let alice = self.0 & 0b111;
        let bob = self.0 >> 3 & 0b111;
        alice == !bob & 0b111
    }

    /// True iff both stations click at the settings of `pair`.
    pub fn contributes_to_coincidence(self, pair: SettingPair) -> bool {
        self.detects(Side::Alice, pair.alice) && self.detects(Side::Bob, pair.bob)
    }

    /// The six symbols reachable by flipping exactly one detection bit.
    pub fn one_step_neighbors(self) -> SymbolSet {
        let mut set = SymbolSet::EMPTY;
        for position in 0..POSITION_COUNT {
            set.insert(WignerSymbol(self.0 ^ (1 << position)));
        }
        set
    }

    /// The six single-bit deviations, classified as loss or gain.
    pub fn one_step_flips(self) -> [Flip; 6] {
        std::array::from_fn(|position| {
            let (side, slot) = if position < 3 {
                (Side::Alice, position)
            } else {
                (Side::Bob, position - 3)
            };
            Flip {
                side,
                setting: Setting(slot as u8 + 1),
                class: if self.bit(position) { FlipClass::Loss } else { FlipClass::Gain },
                result: WignerSymbol(self.0 ^ (1 << position)),
            }
        })
    }

    /// Minimum Hamming distance to any perfect anti-correlation symbol.
    pub fn step_distance(self) -> u32 {
        perfect_symbols()
            .iter()
            .map(|p| (self.0 ^ p.0).count_ones())
            .min()
            .expect("perfect set is nonempty")
    }
}

impl fmt::Display for WignerSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |on: bool| if on { '+' } else { '-' };
        write!(
            f,
            "({}{}{},{}{}{})",
            sign(self.bit(0)),
            sign(self.bit(1)),
            sign(self.bit(2)),
            sign(self.bit(3)),
            sign(self.bit(4)),
            sign(self.bit(5)),
        )
    }
}

impl FromStr for WignerSymbol {
    type Err = SymbolError;

    /// Parses the canonical text form.  Accepts both the ASCII hyphen and
    /// the typographic minus "−" for the no-detection mark; emits ASCII.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || SymbolError::Malformed(text.to_string());
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(malformed)?;
        let (alice, bob) = inner.split_once(',').ok_or_else(malformed)?;
        let mut code = 0u8;
        let mut position = 0;
        for ch in alice.chars().chain(bob.chars()) {
            if position >= POSITION_COUNT {
                return Err(malformed());
            }
            match ch {
                '+' => code |= 1 << position,
                '-' | '\u{2212}' => {}
                _ => return Err(malformed()),
            }
            position += 1;
        }
        if position != POSITION_COUNT || alice.chars().count() != 3 {
            return Err(malformed());
        }
        Ok(WignerSymbol(code))
    }
}

impl Serialize for WignerSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WignerSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// An exact set of Wigner symbols, stored as a 64-bit membership mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SymbolSet(u64);

impl SymbolSet {
    pub const EMPTY: SymbolSet = SymbolSet(0);

    pub fn from_mask(mask: u64) -> Self {
        SymbolSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, symbol: WignerSymbol) {
        self.0 |= 1 << symbol.0;
    }

    pub fn contains(self, symbol: WignerSymbol) -> bool {
        self.0 >> symbol.0 & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 & other.0)
    }

    pub fn difference(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 & !other.0)
    }

    /// Members in ascending integer encoding.
    pub fn iter(self) -> impl Iterator<Item = WignerSymbol> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                return None;
            }
            let code = mask.trailing_zeros() as u8;
            mask &= mask - 1;
            Some(WignerSymbol(code))
        })
    }
}

impl FromIterator<WignerSymbol> for SymbolSet {
    fn from_iter<I: IntoIterator<Item = WignerSymbol>>(iter: I) -> Self {
        let mut set = SymbolSet::EMPTY;
        for symbol in iter {
            set.insert(symbol);
        }
        set
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|s| s.to_string())).finish()
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "{{")?;
        for symbol in self.iter() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{symbol}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl Serialize for SymbolSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// All 64 symbols.
pub fn all_symbols() -> SymbolSet {
    SymbolSet(u64::MAX)
}

/// The 8 symbols with opposite outcomes on the two sides at every setting.
pub fn perfect_symbols() -> [WignerSymbol; 8] {
    std::array::from_fn(|i| {
        let alice = i as u8;
        WignerSymbol(alice | (!alice & 0b111) << 3)
    })
}

/// The perfect anti-correlation symbols as a set.
pub fn perfect_set() -> SymbolSet {
    perfect_symbols().into_iter().collect()
}

/// The 24 symbols at Hamming distance exactly 1 from a perfect symbol.
pub fn one_step_set() -> SymbolSet {
    all_symbols().iter().filter(|s| s.step_distance() == 1).collect()
}

/// Coincidence contributors at `pair` that are not perfect
/// anti-correlations.  Only the three setting pairs used by the derivation
/// are accepted.
pub fn imperfect_contributors(pair: SettingPair) -> Result<SymbolSet, SymbolError> {
    match (pair.alice.index(), pair.bob.index()) {
        (1, 3) | (1, 2) | (2, 3) => Ok(all_symbols()
            .iter()
            .filter(|s| s.contributes_to_coincidence(pair) && !s.is_perfect_anticorrelation())
            .collect()),
        (a, b) => Err(SymbolError::UnsupportedPair(a, b)),
    }
}

/// The residual left after cancelling the imperfect contributors shared
/// between the three setting pairs, with the full term accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidualBreakdown {
    /// Imperfect contributors at (1,3), (1,2) and (2,3); 14 symbols each.
    pub contributors_13: SymbolSet,
    pub contributors_12: SymbolSet,
    pub contributors_23: SymbolSet,
    /// Members of `contributors_12` that also appear in `contributors_13`.
    pub shared_12: SymbolSet,
    /// Members of `contributors_23` that also appear in `contributors_13`.
    pub shared_23: SymbolSet,
    /// What survives: contributors_13 minus both shared sets.
    pub residual: SymbolSet,
    /// Terms written down before cancellation (|S13| + |S'12| + |S'23|).
    pub terms_before_cancellation: usize,
    /// Terms removed by cancellation.
    pub canceled_terms: usize,
}

/// Computes the uncancelable residual `S13 − S'12 − S'23` by exact set
/// arithmetic, where `S'1j` is the intersection of `S1j` with `S13`.
pub fn residual_set() -> ResidualBreakdown {
    let contributors_13 = imperfect_contributors(SettingPair::ONE_THREE).expect("pair in range");
    let contributors_12 = imperfect_contributors(SettingPair::ONE_TWO).expect("pair in range");
    let contributors_23 = imperfect_contributors(SettingPair::TWO_THREE).expect("pair in range");
    let shared_12 = contributors_12.intersection(contributors_13);
    let shared_23 = contributors_23.intersection(contributors_13);
    let residual = contributors_13.difference(shared_12).difference(shared_23);
    let terms_before_cancellation = contributors_13.len() + shared_12.len() + shared_23.len();
    ResidualBreakdown {
        contributors_13,
        contributors_12,
        contributors_23,
        shared_12,
        shared_23,
        residual,
        terms_before_cancellation,
        canceled_terms: terms_before_cancellation - residual.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(text: &str) -> WignerSymbol {
        text.parse().expect("test symbol parses")
    }

    #[test]
    fn all_symbols_has_64_members() {
        assert_eq!(all_symbols().len(), 64);
        assert!(all_symbols().contains(sym("(++-,--+)")));
        assert!(all_symbols().contains(sym("(+++,--+)")));
    }

    #[test]
    fn text_rendering_round_trips() {
        for symbol in all_symbols().iter() {
            let text = symbol.to_string();
            assert_eq!(text.parse::<WignerSymbol>().unwrap(), symbol);
        }
        assert_eq!(sym("(++-,--+)").to_string(), "(++-,--+)");
    }

    #[test]
    fn parse_accepts_typographic_minus() {
        assert_eq!(sym("(+\u{2212}\u{2212},\u{2212}++)"), sym("(+--,-++)"));
    }

    #[test]
    fn parse_rejects_malformed_text() {
        for bad in ["", "(+--,-++", "+--,-++", "(+--,-+)", "(+--x,-++)", "(+---,++)"] {
            assert!(bad.parse::<WignerSymbol>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn perfect_anticorrelation_examples() {
        assert!(sym("(++-,--+)").is_perfect_anticorrelation());
        assert!(!sym("(+++,--+)").is_perfect_anticorrelation());
        let count = all_symbols().iter().filter(|s| s.is_perfect_anticorrelation()).count();
        assert_eq!(count, 8);
        assert_eq!(perfect_set().len(), 8);
        for p in perfect_symbols() {
            assert!(p.is_perfect_anticorrelation());
        }
    }

    #[test]
    fn coincidence_contribution_examples() {
        assert!(sym("(++-,--+)").contributes_to_coincidence(SettingPair::ONE_THREE));
        assert!(!sym("(++-,--+)").contributes_to_coincidence(SettingPair::ONE_TWO));
        assert!(sym("(+-+,+-+)").contributes_to_coincidence(SettingPair::ONE_ONE));
    }

    #[test]
    fn fourteen_imperfect_contributors_per_pair() {
        for pair in [SettingPair::ONE_THREE, SettingPair::ONE_TWO, SettingPair::TWO_THREE] {
            let set = imperfect_contributors(pair).unwrap();
            assert_eq!(set.len(), 14, "pair {pair}");
            // 16 contributors in total, 2 of them perfect.
            let contributors =
                all_symbols().iter().filter(|s| s.contributes_to_coincidence(pair)).count();
            assert_eq!(contributors, 16);
        }
        assert!(imperfect_contributors(SettingPair::ONE_THREE).unwrap().contains(sym("(+++,--+)")));
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        for (a, b) in [(1, 1), (2, 2), (3, 3), (2, 1), (3, 1), (3, 2)] {
            let pair = SettingPair::new(a, b).unwrap();
            assert_eq!(imperfect_contributors(pair), Err(SymbolError::UnsupportedPair(a, b)));
        }
    }

    #[test]
    fn residual_is_the_four_uncancelable_symbols() {
        let breakdown = residual_set();
        let expected: SymbolSet = ["(+--,--+)", "(+-+,--+)", "(+--,+-+)", "(+-+,+-+)"]
            .into_iter()
            .map(sym)
            .collect();
        assert_eq!(breakdown.residual, expected);
        assert_eq!(breakdown.terms_before_cancellation, 28);
        assert_eq!(breakdown.canceled_terms, 24);
        assert_eq!(breakdown.shared_12.len(), 7);
        assert_eq!(breakdown.shared_23.len(), 7);
    }

    #[test]
    fn residual_is_disjoint_from_perfect_set() {
        let breakdown = residual_set();
        assert!(breakdown.residual.intersection(perfect_set()).is_empty());
        for symbol in breakdown.residual.iter() {
            assert!(symbol.detects(Side::Alice, Setting::ONE));
            assert!(
                symbol.detects(Side::Bob, Setting::ONE) || symbol.detects(Side::Bob, Setting::THREE)
            );
        }
    }

    #[test]
    fn one_step_neighbor_listings() {
        let first: SymbolSet =
            ["(---,-++)", "(++-,-++)", "(+-+,-++)", "(+--,+++)", "(+--,--+)", "(+--,-+-)"]
                .into_iter()
                .map(sym)
                .collect();
        assert_eq!(sym("(+--,-++)").one_step_neighbors(), first);

        let second: SymbolSet =
            ["(-+-,--+)", "(+--,--+)", "(+++,--+)", "(++-,+-+)", "(++-,-++)", "(++-,---)"]
                .into_iter()
                .map(sym)
                .collect();
        assert_eq!(sym("(++-,--+)").one_step_neighbors(), second);

        for symbol in all_symbols().iter() {
            assert_eq!(symbol.one_step_neighbors().len(), 6);
        }
    }

    #[test]
    fn flips_classify_loss_and_gain() {
        let flips = sym("(+--,-++)").one_step_flips();
        assert_eq!(flips.len(), 6);
        let losses: Vec<_> = flips.iter().filter(|f| f.class == FlipClass::Loss).collect();
        let gains: Vec<_> = flips.iter().filter(|f| f.class == FlipClass::Gain).collect();
        assert_eq!(losses.len(), 3);
        assert_eq!(gains.len(), 3);
        // Losing the final "+" of (+--,-++) gives (+--,-+-).
        let last = flips
            .iter()
            .find(|f| f.side == Side::Bob && f.setting == Setting::THREE)
            .unwrap();
        assert_eq!(last.class, FlipClass::Loss);
        assert_eq!(last.result, sym("(+--,-+-)"));
        // Gaining at Bob's first position gives (+--,+++).
        let fourth = flips
            .iter()
            .find(|f| f.side == Side::Bob && f.setting == Setting::ONE)
            .unwrap();
        assert_eq!(fourth.class, FlipClass::Gain);
        assert_eq!(fourth.result, sym("(+--,+++)"));
    }

    #[test]
    fn step_distance_examples() {
        assert_eq!(sym("(++-,--+)").step_distance(), 0);
        assert_eq!(sym("(+--,--+)").step_distance(), 1);
        let one_step = one_step_set();
        assert_eq!(one_step.len(), 24);
        // Every one-step symbol touches exactly two perfect symbols.
        for symbol in one_step.iter() {
            let perfect_neighbors =
                symbol.one_step_neighbors().intersection(perfect_set()).len();
            assert_eq!(perfect_neighbors, 2, "{symbol}");
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric() {
        for s in all_symbols().iter() {
            for t in s.one_step_neighbors().iter() {
                assert!(t.one_step_neighbors().contains(s));
            }
        }
    }

    #[test]
    fn set_operations_are_exact() {
        let a: SymbolSet = ["(+--,--+)", "(+-+,--+)"].into_iter().map(sym).collect();
        let b: SymbolSet = ["(+-+,--+)", "(+++,+++)"].into_iter().map(sym).collect();
        assert_eq!(a.union(b).len(), 3);
        assert_eq!(a.intersection(b).len(), 1);
        assert_eq!(a.difference(b).len(), 1);
        assert!(a.difference(b).contains(sym("(+--,--+)")));
    }

    #[test]
    fn setting_validation() {
        assert!(Setting::new(0).is_err());
        assert!(Setting::new(4).is_err());
        assert_eq!(Setting::new(2).unwrap(), Setting::TWO);
    }

    #[test]
    fn symbols_serialize_as_canonical_text() {
        let json = serde_json::to_string(&sym("(+--,-++)")).unwrap();
        assert_eq!(json, "\"(+--,-++)\"");
        let back: WignerSymbol = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sym("(+--,-++)"));
    }
}
