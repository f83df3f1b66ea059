//! Probability layer over the symbol algebra: hidden-variable models as
//! weight vectors over the 64 symbols, the inequality checks, extended
//! fairness noise mixtures and the adversarial spiked model.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::symbol::{
    perfect_symbols, residual_set, Setting, SettingPair, Side, SymbolSet, WignerSymbol,
    SYMBOL_COUNT,
};

/// Absolute tolerance for probability identities.  Sums of at most 64
/// doubles stay well inside this.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("weight for symbol {symbol} is {weight}, expected a finite value >= 0")]
    InvalidWeight { symbol: WignerSymbol, weight: f64 },
    #[error("weights sum to {sum}, expected 1 within {PROBABILITY_TOLERANCE}")]
    WeightSumMismatch { sum: f64 },
    #[error("epsilon is {0}, expected a value in [0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("extra weight is {0}, expected a value in [0, 1)")]
    ExtraOutOfRange(f64),
    #[error("flip biases are loss={loss}, gain={gain}; both must be finite, >= 0 and not both 0")]
    InvalidBias { loss: f64, gain: f64 },
    #[error("cannot build a uniform distribution over an empty symbol set")]
    EmptySet,
}

/// Probability weights over all 64 Wigner symbols: the concrete stand-in
/// for a hidden-variable model.  The 64 symbols exhaustively partition the
/// counterfactual outcome patterns, so the weights must sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    weights: [f64; SYMBOL_COUNT],
}

impl SymbolDistribution {
    pub fn new(weights: [f64; SYMBOL_COUNT]) -> Result<Self, DistributionError> {
        for (code, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(DistributionError::InvalidWeight {
                    symbol: WignerSymbol::from_code(code as u8).expect("index below 64"),
                    weight,
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(DistributionError::WeightSumMismatch { sum });
        }
        Ok(SymbolDistribution { weights })
    }

    /// All mass on a single symbol.
    pub fn point(symbol: WignerSymbol) -> Self {
        let mut weights = [0.0; SYMBOL_COUNT];
        weights[symbol.code() as usize] = 1.0;
        SymbolDistribution { weights }
    }

    /// Equal mass on every member of `set`.
    pub fn uniform_over(set: SymbolSet) -> Result<Self, DistributionError> {
        if set.is_empty() {
            return Err(DistributionError::EmptySet);
        }
        let share = 1.0 / set.len() as f64;
        let mut weights = [0.0; SYMBOL_COUNT];
        for symbol in set.iter() {
            weights[symbol.code() as usize] = share;
        }
        Ok(SymbolDistribution { weights })
    }

    pub fn weight(&self, symbol: WignerSymbol) -> f64 {
        self.weights[symbol.code() as usize]
    }

    pub fn weights(&self) -> &[f64; SYMBOL_COUNT] {
        &self.weights
    }

    /// Total weight carried by the members of `set`.
    pub fn mass_of(&self, set: SymbolSet) -> f64 {
        set.iter().map(|s| self.weight(s)).sum()
    }

    /// Probability of a coincident detection at the given setting pair.
    pub fn coincidence_probability(&self, pair: SettingPair) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(code, _)| {
                WignerSymbol::from_code(*code as u8)
                    .expect("index below 64")
                    .contributes_to_coincidence(pair)
            })
            .map(|(_, w)| w)
            .sum()
    }

    /// Probability of a local detection at one station.  Independent of the
    /// remote setting by construction: no remote parameter exists.
    pub fn singles_probability(&self, side: Side, setting: Setting) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(code, _)| {
                WignerSymbol::from_code(*code as u8).expect("index below 64").detects(side, setting)
            })
            .map(|(_, w)| w)
            .sum()
    }

    /// The six singles probabilities: Alice settings 1..3, then Bob 1..3.
    pub fn singles_profile(&self) -> [f64; 6] {
        let settings = [Setting::ONE, Setting::TWO, Setting::THREE];
        std::array::from_fn(|i| {
            let (side, setting) =
                if i < 3 { (Side::Alice, settings[i]) } else { (Side::Bob, settings[i - 3]) };
            self.singles_probability(side, setting)
        })
    }

    /// Checks the pre-assumption bound `P13 − S ≤ P12 + P23`, with `S` the
    /// residual mass.  This is an identity of the set cancellation and must
    /// hold for every distribution.
    pub fn raw_bound_check(&self) -> RawBoundCheck {
        let residual_mass = self.mass_of(residual_set().residual);
        let lhs = self.coincidence_probability(SettingPair::ONE_THREE) - residual_mass;
        let rhs = self.coincidence_probability(SettingPair::ONE_TWO)
            + self.coincidence_probability(SettingPair::TWO_THREE);
        RawBoundCheck { lhs, rhs, holds: lhs <= rhs + PROBABILITY_TOLERANCE }
    }

    /// Evaluates `P13 − P11 ≤ P12 + P23` on this distribution.
    pub fn extended_inequality(&self) -> InequalityEvaluation {
        let p13 = self.coincidence_probability(SettingPair::ONE_THREE);
        let p12 = self.coincidence_probability(SettingPair::ONE_TWO);
        let p23 = self.coincidence_probability(SettingPair::TWO_THREE);
        let p11 = self.coincidence_probability(SettingPair::ONE_ONE);
        InequalityEvaluation::from_probabilities(p13, p12, p23, p11)
    }
}

/// Serializes as a `{"(+--,-++)": weight}` map over the symbols with
/// nonzero weight, keyed by canonical text.
impl Serialize for SymbolDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: BTreeMap<String, f64> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(code, &w)| {
                (WignerSymbol::from_code(code as u8).expect("index below 64").to_string(), w)
            })
            .collect();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (key, value) in entries {
            map.serialize_entry(&key, &value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SymbolDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let entries = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut weights = [0.0; SYMBOL_COUNT];
        for (text, weight) in entries {
            let symbol: WignerSymbol = text.parse().map_err(D::Error::custom)?;
            weights[symbol.code() as usize] += weight;
        }
        SymbolDistribution::new(weights).map_err(D::Error::custom)
    }
}

/// Outcome of the identity bound `P13 − S ≤ P12 + P23`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The four probabilities entering `P13 − P11 ≤ P12 + P23` and the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityEvaluation {
    pub p13: f64,
    pub p12: f64,
    pub p23: f64,
    pub p11: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl InequalityEvaluation {
    pub fn from_probabilities(p13: f64, p12: f64, p23: f64, p11: f64) -> Self {
        let lhs = p13 - p11;
        let rhs = p12 + p23;
        InequalityEvaluation { p13, p12, p23, p11, lhs, rhs, satisfied: lhs <= rhs + PROBABILITY_TOLERANCE }
    }

    /// Positive when the inequality is violated.
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn validate_base(base: &[f64; 8]) -> Result<(), DistributionError> {
    let perfect = perfect_symbols();
    for (i, &w) in base.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(DistributionError::InvalidWeight { symbol: perfect[i], weight: w });
        }
    }
    let sum: f64 = base.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(DistributionError::WeightSumMismatch { sum });
    }
    Ok(())
}

/// Extended-fairness noise mixture, case "loss and gain about equally
/// likely": each perfect symbol keeps weight `1 − epsilon` and spreads
/// `epsilon` equally over its six one-step deviations.
///
/// `base` indexes the 8 perfect symbols in ascending encoding order.
pub fn efa_mixture(base: &[f64; 8], epsilon: f64) -> Result<SymbolDistribution, DistributionError> {
    efa_mixture_biased(base, epsilon, 1.0, 1.0)
}

/// Extended-fairness mixture with a loss/gain imbalance: within each
/// deviation class the six positions stay equally likely, but losses carry
/// weight proportional to `loss_bias` and gains to `gain_bias`.  Equal
/// biases recover [`efa_mixture`]; a dominant class models the other two
/// cases of the assumption.
pub fn efa_mixture_biased(
    base: &[f64; 8],
    epsilon: f64,
    loss_bias: f64,
    gain_bias: f64,
) -> Result<SymbolDistribution, DistributionError> {
    validate_base(base)?;
    if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
        return Err(DistributionError::EpsilonOutOfRange(epsilon));
    }
    if !loss_bias.is_finite() || !gain_bias.is_finite() || loss_bias < 0.0 || gain_bias < 0.0
        || loss_bias + gain_bias == 0.0
    {
        return Err(DistributionError::InvalidBias { loss: loss_bias, gain: gain_bias });
    }
    // A perfect symbol has three loss flips and three gain flips.
    let norm = 3.0 * (loss_bias + gain_bias);
    let loss_share = loss_bias / norm;
    let gain_share = gain_bias / norm;

    let mut weights = [0.0; SYMBOL_COUNT];
    for (i, parent) in perfect_symbols().into_iter().enumerate() {
        let parent_weight = base[i];
        if parent_weight == 0.0 {
            continue;
        }
        weights[parent.code() as usize] += parent_weight * (1.0 - epsilon);
        for flip in parent.one_step_flips() {
            let share = match flip.class {
                crate::symbol::FlipClass::Loss => loss_share,
                crate::symbol::FlipClass::Gain => gain_share,
            };
            weights[flip.result.code() as usize] += parent_weight * epsilon * share;
        }
    }
    SymbolDistribution::new(weights)
}

/// The appendix's "balancing act" model: an even mixture of the perfect
/// symbols plus `extra` mass on `(+--,--+)`.  Returns the distribution and
/// its singles profile (Alice settings 1..3, then Bob 1..3); the extra mass
/// spikes Alice's setting 1 and Bob's setting 3.
pub fn adversarial_hvm(extra: f64) -> Result<(SymbolDistribution, [f64; 6]), DistributionError> {
    if !(0.0..1.0).contains(&extra) {
        return Err(DistributionError::ExtraOutOfRange(extra));
    }
    let spike: WignerSymbol = "(+--,--+)".parse().expect("literal parses");
    let mut weights = [0.0; SYMBOL_COUNT];
    for parent in perfect_symbols() {
        weights[parent.code() as usize] = (1.0 - extra) / 8.0;
    }
    weights[spike.code() as usize] += extra;
    let distribution = SymbolDistribution::new(weights)?;
    let profile = distribution.singles_profile();
    Ok((distribution, profile))
}

/// The pseudo-random stream used for every seeded draw in this crate:
/// ChaCha8, a counter-based stream cipher, keyed via `seed_from_u64`.
/// Identical seeds produce identical streams on every platform.
pub fn seeded_stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform f64 in [0, 1) from the top 53 bits of the next stream word.
fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample_simplex<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    // Exponential normalization: iid Exp(1) draws divided by their sum are
    // uniform on the (N-1)-simplex.
    let mut draws = [0.0; N];
    let mut total = 0.0;
    for slot in &mut draws {
        let e = -(1.0 - next_unit(rng)).ln();
        *slot = e;
        total += e;
    }
    for slot in &mut draws {
        *slot /= total;
    }
    draws
}

/// Uniform sample from the 63-simplex, reproducible from the seed.
pub fn random_distribution(seed: u64) -> SymbolDistribution {
    let mut rng = seeded_stream(seed);
    sample_distribution(&mut rng)
}

/// Draws the next uniform-simplex distribution from an existing stream.
pub fn sample_distribution(rng: &mut ChaCha8Rng) -> SymbolDistribution {
    SymbolDistribution::new(sample_simplex::<SYMBOL_COUNT>(rng))
        .expect("normalized exponential draws form a distribution")
}

/// Draws a random extended-fairness mixture: base weights uniform on the
/// 7-simplex and epsilon uniform in [0, 1].
pub fn sample_efa_mixture(rng: &mut ChaCha8Rng) -> SymbolDistribution {
    let base = sample_simplex::<8>(rng);
    let epsilon = next_unit(rng);
    efa_mixture(&base, epsilon).expect("sampled parameters are in range")
}
