//! Toolkit for the extended Wigner inequality.
//!
//! The inequality `P13 − P11 ≤ P12 + P23` bounds the coincidence statistics
//! of any local hidden-variable model whose deviations from perfect
//! anti-correlation are homogeneous across measurement settings (the
//! extended fairness assumption).  This crate provides:
//!
//! * [`symbol`] — exact set algebra over the 64 counterfactual outcome
//!   patterns ("Wigner symbols") that mechanically reproduces the
//!   derivation of the inequality,
//! * [`lhv`] — probability distributions over symbols, the inequality
//!   checks, extended-fairness noise mixtures and an adversarial model,
//! * [`quantum`] — the singlet-state predictor, the violation-angle scan,
//!   and slit-wheel coincidence probabilities for entangled orbital
//!   angular momentum states in closed form and by numerical quadrature,
//! * [`analysis`] — turning measured coincidence counts into a violation
//!   report with the finite-slit compensation term and Poisson error
//!   propagation,
//! * [`census`] — exhaustive enumeration of on/off hidden-variable models
//!   with flat-singles predicates.

pub mod analysis;
pub mod census;
pub mod lhv;
pub mod quantum;
pub mod symbol;

pub use analysis::{
    analyze, compensated_minimum, evaluate_violation, ingest_counts, poisson_sigma,
    propagate_sigma, significance, AnalysisError, AnalysisInput, AnalysisReport, CountSet,
    IngestError, SigmaConvention, ViolationReport,
};
pub use census::{
    census_one_step, census_perfect, census_scan_partitioned, efa_group_census, is_flat,
    likelihood_ratio, likelihood_ratio_from_counts, merge_partials, CensusError, CensusResult,
    CensusUniverse, FlatnessPredicate, FlatnessVariant, GroupingRule, PartialCensus,
    SymbolSubsetCode,
};
pub use lhv::{
    adversarial_hvm, efa_mixture, efa_mixture_biased, random_distribution, sample_distribution,
    sample_efa_mixture, seeded_stream, DistributionError, InequalityEvaluation, RawBoundCheck,
    SymbolDistribution, PROBABILITY_TOLERANCE,
};
pub use quantum::{
    fringe_curve, fringe_curve_csv, fringe_phase_deg, max_violation_scan, oam_coincidence,
    singlet_probability, slitwheel_extremes, slitwheel_probability, slitwheel_probability_numeric,
    wigner_evaluation, AngleTriple, QuantumError, SlitWheelConfig, SlitWheelPrediction,
    ViolationScan,
};
pub use symbol::{
    all_symbols, imperfect_contributors, one_step_set, perfect_set, perfect_symbols,
    residual_set, Flip, FlipClass, ResidualBreakdown, Setting, SettingPair, Side, SymbolError,
    SymbolSet, WignerSymbol,
};
