//! `wigner` — batch CLI over the inequality toolkit.  Every command writes
//! one JSON report (CSV for curves) and is deterministic given its flags
//! and seed.
//!
//! Exit codes: 0 success / targets met, 1 validation error, 2 self-check
//! or property failure.

mod reports;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wigner_core::analysis::{analyze, ingest_counts, ExtremeOverrides, SigmaConvention};
use wigner_core::census::{
    census_one_step, census_perfect, efa_group_census, CensusResult, FlatnessPredicate,
    FlatnessVariant, GroupingRule,
};
use wigner_core::lhv::{
    adversarial_hvm, sample_distribution, sample_efa_mixture, seeded_stream,
    PROBABILITY_TOLERANCE,
};
use wigner_core::quantum::{
    fringe_curve, fringe_curve_csv, fringe_phase_deg, max_violation_scan,
    slitwheel_probability, slitwheel_probability_numeric, wigner_evaluation, AngleTriple,
    QuantumError, SlitWheelConfig,
};
use wigner_core::symbol::residual_set;

use reports::{
    AdversaryReport, CensusReport, DeriveReport, FringeSection, MontecarloReport,
    PropertyRunSummary, QuantumReport, ScanSection, SlitwheelReport,
};

/// Distinct substream for the mixture half of the Monte Carlo run.
const EFA_STREAM_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Parser)]
#[command(
    name = "wigner",
    version,
    about = "Extended Wigner inequality: derivation checks, quantum predictions, \
             count analysis and hidden-variable censuses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Write the JSON report to this path instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit wall-clock timing fields so identical runs emit identical bytes.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Re-derive the set algebra behind the inequality and verify the term
    /// accounting against its hard targets.
    Derive {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Singlet-state evaluation of the inequality, optionally with an
    /// exhaustive violation-angle scan.
    Quantum {
        /// First measurement angle in degrees.
        #[arg(long, default_value_t = 0.0)]
        theta1: f64,
        /// Second measurement angle in degrees.
        #[arg(long, default_value_t = 30.0)]
        theta2: f64,
        /// Third measurement angle in degrees.
        #[arg(long, default_value_t = 60.0)]
        theta3: f64,
        /// Run the grid scan with this step (degrees, at most 5).
        #[arg(long)]
        scan_step: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Slit-wheel coincidence probability: closed form, quadrature oracle
    /// and optionally one fringe period as CSV.
    Slitwheel {
        /// OAM quantum number of the entangled state.
        #[arg(long, default_value_t = 100)]
        l: u32,
        /// Slit width as a fraction of the slit spacing.
        #[arg(long, default_value_t = 0.149)]
        slit_width: f64,
        /// Relative wheel angle in radians (0 = anti-correlated minimum).
        #[arg(long, default_value_t = 0.0)]
        relative_angle: f64,
        /// Gauss-Legendre points per slit.
        #[arg(long, default_value_t = 64)]
        quadrature_points: u32,
        /// Sample count for the fringe CSV.
        #[arg(long, default_value_t = 101, requires = "fringe_csv")]
        fringe_points: u32,
        /// Write one fringe period as CSV to this path.
        #[arg(long)]
        fringe_csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate a measured dataset into a violation report.
    Analyze {
        /// Dataset file (TOML, or two-column CSV with dotted keys).
        #[arg(long)]
        input: PathBuf,
        /// Replace the predicted coincidence minimum (requires --p-max).
        #[arg(long, requires = "p_max")]
        p_min: Option<f64>,
        /// Replace the predicted coincidence maximum (requires --p-min).
        #[arg(long, requires = "p_min")]
        p_max: Option<f64>,
        /// Error-propagation convention for the i_max term.
        #[arg(long, value_enum, default_value_t = ConventionArg::Scaled)]
        sigma_convention: ConventionArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Exhaustive flat-singles census over one model family.
    Census {
        /// Which on/off family to scan.
        #[arg(long, value_enum)]
        universe: UniverseArg,
        /// Flatness predicate variant.
        #[arg(long, value_enum, default_value_t = PredicateArg::BothSides)]
        predicate: PredicateArg,
        /// Tolerate a per-side spread of one count instead of exact equality.
        #[arg(long)]
        relaxed: bool,
        /// Worker threads for the scan.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        shards: u32,
        /// Grouping applied when --universe grouped.
        #[arg(long, value_enum, default_value_t = GroupingArg::ByParentPair)]
        grouping: GroupingArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Monte Carlo property runs: the identity bound on random models and
    /// the inequality on extended-fairness mixtures.
    Montecarlo {
        /// Random models per property.
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Seed of the ChaCha8 draw stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// The spiked adversarial model: singles profile and inequality status.
    Adversary {
        /// Extra mass placed on the spiked symbol, in [0, 1).
        #[arg(long, default_value_t = 0.2)]
        extra: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum UniverseArg {
    /// The 8 perfect anti-correlation symbols (2^8 combinations).
    Perfect,
    /// The 24 one-step symbols (2^24 combinations).
    #[value(name = "one-step")]
    OneStep,
    /// One-step symbols constrained to toggle by parent pair.
    Grouped,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    #[value(name = "alice_only")]
    AliceOnly,
    #[value(name = "both_sides")]
    BothSides,
}

impl From<PredicateArg> for FlatnessVariant {
    fn from(arg: PredicateArg) -> Self {
        match arg {
            PredicateArg::AliceOnly => FlatnessVariant::AliceOnly,
            PredicateArg::BothSides => FlatnessVariant::BothSides,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ConventionArg {
    Scaled,
    Unscaled,
}

impl From<ConventionArg> for SigmaConvention {
    fn from(arg: ConventionArg) -> Self {
        match arg {
            ConventionArg::Scaled => SigmaConvention::Scaled,
            ConventionArg::Unscaled => SigmaConvention::Unscaled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupingArg {
    #[value(name = "by_parent_pair")]
    ByParentPair,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(common: &CommonOpts, report: &impl Serialize) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).context("serializing report")?;
    json.push('\n');
    match &common.output {
        Some(path) => std::fs::write(path, json)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Derive { common } => {
            let report = DeriveReport::build(&residual_set());
            emit(&common, &report)?;
            Ok(if report.targets_met { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Quantum { theta1, theta2, theta3, scan_step, common } => {
            let angles = AngleTriple::new(theta1, theta2, theta3);
            let scan = match scan_step {
                Some(step) => {
                    let scan = max_violation_scan(step)?;
                    Some(ScanSection {
                        grid_step_deg: step,
                        best: scan.best,
                        margin: scan.margin,
                        evaluated: scan.evaluated,
                    })
                }
                None => None,
            };
            let report = QuantumReport { angles, evaluation: wigner_evaluation(angles), scan };
            emit(&common, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Slitwheel {
            l,
            slit_width,
            relative_angle,
            quadrature_points,
            fringe_points,
            fringe_csv,
            common,
        } => {
            let config = SlitWheelConfig::new(l, slit_width, relative_angle, quadrature_points)?;
            let closed_form = slitwheel_probability(&config);
            let numeric = match slitwheel_probability_numeric(&config) {
                Ok(value) => value,
                Err(err @ QuantumError::NonConvergence { .. }) => {
                    eprintln!("error: {err}");
                    return Ok(ExitCode::from(2));
                }
                Err(err) => return Err(err.into()),
            };
            let fringe = match &fringe_csv {
                Some(path) => {
                    let samples = fringe_curve(l, slit_width, fringe_points)?;
                    std::fs::write(path, fringe_curve_csv(&samples))
                        .with_context(|| format!("writing fringe CSV to {}", path.display()))?;
                    Some(FringeSection { points: fringe_points, path: path.display().to_string() })
                }
                None => None,
            };
            let report = SlitwheelReport {
                config,
                closed_form,
                numeric,
                relative_error: (numeric - closed_form.p).abs() / closed_form.p,
                fringe_phase_per_degree: fringe_phase_deg(l, 1.0),
                fringe,
            };
            emit(&common, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input, p_min, p_max, sigma_convention, common } => {
            let mut dataset = ingest_counts(&input)?;
            if let (Some(p_min), Some(p_max)) = (p_min, p_max) {
                dataset.overrides = Some(ExtremeOverrides { p_min, p_max });
            }
            let report = analyze(&dataset, sigma_convention.into())?;
            emit(&common, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Census { universe, predicate, relaxed, shards, grouping, common } => {
            let predicate =
                FlatnessPredicate { variant: predicate.into(), strict: !relaxed };
            let mut result: CensusResult = match universe {
                UniverseArg::Perfect => census_perfect(predicate),
                UniverseArg::OneStep => census_one_step(predicate, shards)?,
                UniverseArg::Grouped => {
                    let GroupingArg::ByParentPair = grouping;
                    efa_group_census(GroupingRule::ByParentPair, predicate)?
                }
            };
            if common.no_timing {
                result.elapsed_s = None;
            }
            emit(&common, &CensusReport { result })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Montecarlo { samples, seed, common } => {
            let started = Instant::now();

            let mut rng = seeded_stream(seed);
            let mut raw_failures = 0u64;
            let mut raw_slack = f64::NEG_INFINITY;
            for _ in 0..samples {
                let check = sample_distribution(&mut rng).raw_bound_check();
                raw_slack = raw_slack.max(check.lhs - check.rhs);
                if !check.holds {
                    raw_failures += 1;
                }
            }

            let mut rng = seeded_stream(seed ^ EFA_STREAM_SALT);
            let mut efa_failures = 0u64;
            let mut efa_slack = f64::NEG_INFINITY;
            for _ in 0..samples {
                let eval = sample_efa_mixture(&mut rng).extended_inequality();
                efa_slack = efa_slack.max(eval.margin());
                if !eval.satisfied {
                    efa_failures += 1;
                }
            }

            let passed = raw_failures == 0
                && efa_failures == 0
                && raw_slack <= PROBABILITY_TOLERANCE
                && efa_slack <= PROBABILITY_TOLERANCE;
            let report = MontecarloReport {
                seed,
                samples,
                tolerance: PROBABILITY_TOLERANCE,
                raw_bound: PropertyRunSummary {
                    samples,
                    failures: raw_failures,
                    max_slack: raw_slack,
                },
                efa_mixtures: PropertyRunSummary {
                    samples,
                    failures: efa_failures,
                    max_slack: efa_slack,
                },
                passed,
                elapsed_s: if common.no_timing {
                    None
                } else {
                    Some(started.elapsed().as_secs_f64())
                },
            };
            emit(&common, &report)?;
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Adversary { extra, common } => {
            let (distribution, singles_profile) = adversarial_hvm(extra)?;
            let evaluation = distribution.extended_inequality();
            let report = AdversaryReport { extra, distribution, singles_profile, evaluation };
            emit(&common, &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
