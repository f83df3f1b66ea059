//! Serializable report bodies for every subcommand.  Field order is fixed
//! by the struct declarations, so identical runs emit identical bytes.

use serde::Serialize;

use wigner_core::census::CensusResult;
use wigner_core::lhv::{InequalityEvaluation, SymbolDistribution};
use wigner_core::quantum::{AngleTriple, SlitWheelConfig, SlitWheelPrediction};
use wigner_core::symbol::{ResidualBreakdown, SymbolSet};

/// Hard targets the derivation self-check must reproduce.
pub struct DeriveTargets {
    pub contributor_size: usize,
    pub terms_before_cancellation: usize,
    pub canceled_terms: usize,
    pub residual: SymbolSet,
}

impl DeriveTargets {
    pub fn expected() -> Self {
        let residual = ["(+--,--+)", "(+-+,--+)", "(+--,+-+)", "(+-+,+-+)"]
            .into_iter()
            .map(|t| t.parse().expect("literal symbol"))
            .collect();
        DeriveTargets {
            contributor_size: 14,
            terms_before_cancellation: 28,
            canceled_terms: 24,
            residual,
        }
    }
}

#[derive(Serialize)]
pub struct DeriveReport {
    pub contributors_13: SymbolSet,
    pub contributors_12: SymbolSet,
    pub contributors_23: SymbolSet,
    pub contributor_sizes: [usize; 3],
    pub shared_with_13: [usize; 2],
    pub residual: SymbolSet,
    pub terms_before_cancellation: usize,
    pub canceled_terms: usize,
    pub targets_met: bool,
}

impl DeriveReport {
    pub fn build(breakdown: &ResidualBreakdown) -> Self {
        let targets = DeriveTargets::expected();
        let sizes = [
            breakdown.contributors_13.len(),
            breakdown.contributors_12.len(),
            breakdown.contributors_23.len(),
        ];
        let targets_met = sizes.iter().all(|&s| s == targets.contributor_size)
            && breakdown.terms_before_cancellation == targets.terms_before_cancellation
            && breakdown.canceled_terms == targets.canceled_terms
            && breakdown.residual == targets.residual;
        DeriveReport {
            contributors_13: breakdown.contributors_13,
            contributors_12: breakdown.contributors_12,
            contributors_23: breakdown.contributors_23,
            contributor_sizes: sizes,
            shared_with_13: [breakdown.shared_12.len(), breakdown.shared_23.len()],
            residual: breakdown.residual,
            terms_before_cancellation: breakdown.terms_before_cancellation,
            canceled_terms: breakdown.canceled_terms,
            targets_met,
        }
    }
}

#[derive(Serialize)]
pub struct ScanSection {
    pub grid_step_deg: f64,
    pub best: AngleTriple,
    pub margin: f64,
    pub evaluated: usize,
}

#[derive(Serialize)]
pub struct QuantumReport {
    pub angles: AngleTriple,
    pub evaluation: InequalityEvaluation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
}

#[derive(Serialize)]
pub struct FringeSection {
    pub points: u32,
    pub path: String,
}

#[derive(Serialize)]
pub struct SlitwheelReport {
    pub config: SlitWheelConfig,
    pub closed_form: SlitWheelPrediction,
    pub numeric: f64,
    pub relative_error: f64,
    pub fringe_phase_per_degree: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe: Option<FringeSection>,
}

#[derive(Serialize)]
pub struct PropertyRunSummary {
    pub samples: u64,
    pub failures: u64,
    /// Largest observed lhs − rhs; nonpositive (within tolerance) when the
    /// property holds everywhere.
    pub max_slack: f64,
}

#[derive(Serialize)]
pub struct MontecarloReport {
    pub seed: u64,
    pub samples: u64,
    pub tolerance: f64,
    pub raw_bound: PropertyRunSummary,
    pub efa_mixtures: PropertyRunSummary,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

#[derive(Serialize)]
pub struct AdversaryReport {
    pub extra: f64,
    pub distribution: SymbolDistribution,
    /// Alice settings 1..3, then Bob settings 1..3.
    pub singles_profile: [f64; 6],
    pub evaluation: InequalityEvaluation,
}

#[derive(Serialize)]
pub struct CensusReport {
    #[serde(flatten)]
    pub result: CensusResult,
}
