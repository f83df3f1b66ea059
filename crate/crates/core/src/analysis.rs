//! Turns measured coincidence counts into a violation report: the
//! finite-slit compensation of the coincidence minimum, the intensity form
//! of the inequality, Poisson error propagation and the significance.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{slitwheel_extremes, QuantumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("i_min ({i_min}) exceeds i_max ({i_max})")]
    CountOrder { i_min: u64, i_max: u64 },
    #[error("compensation requires i_max > 0")]
    ZeroMaxCount,
    #[error("predicted extremes must satisfy 0 <= p_min <= p_max with p_max > 0, got p_min={p_min}, p_max={p_max}")]
    InvalidExtremes { p_min: f64, p_max: f64 },
    #[error("significance is undefined when sigma is 0")]
    ZeroSigma,
    #[error("unknown sigma convention {0:?}; expected \"scaled\" or \"unscaled\"")]
    UnknownConvention(String),
    #[error(transparent)]
    Wheel(#[from] QuantumError),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: line {line}: {message}")]
    Csv { path: String, line: usize, message: String },
    #[error("{path}: field {field}: {message}")]
    Invalid { path: String, field: String, message: String },
}

/// Total coincidence counts at the setting pairs entering the intensity
/// inequality, plus the coincidence minimum and maximum, all taken over
/// equal acquisition time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSet {
    pub i13: u64,
    pub i12: u64,
    pub i23: u64,
    pub i_min: u64,
    pub i_max: u64,
}

impl CountSet {
    pub fn new(i13: u64, i12: u64, i23: u64, i_min: u64, i_max: u64) -> Result<Self, AnalysisError> {
        if i_min > i_max {
            return Err(AnalysisError::CountOrder { i_min, i_max });
        }
        Ok(CountSet { i13, i12, i23, i_min, i_max })
    }

    fn total(&self) -> u64 {
        self.i13 + self.i12 + self.i23 + self.i_min + self.i_max
    }
}

/// How the uncertainty of the compensated maximum term enters the error
/// budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaConvention {
    /// First-order propagation: the i_max term is weighted by
    /// (p_min/p_max)², matching the derivative of the compensated minimum.
    Scaled,
    /// The i_max variance enters unweighted.
    Unscaled,
}

impl SigmaConvention {
    pub fn label(self) -> &'static str {
        match self {
            SigmaConvention::Scaled => "scaled",
            SigmaConvention::Unscaled => "unscaled",
        }
    }
}

impl fmt::Display for SigmaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SigmaConvention {
    type Err = AnalysisError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "scaled" => Ok(SigmaConvention::Scaled),
            "unscaled" => Ok(SigmaConvention::Unscaled),
            other => Err(AnalysisError::UnknownConvention(other.to_string())),
        }
    }
}

/// Poisson standard deviation of a total count: √n.
pub fn poisson_sigma(count: u64) -> f64 {
    (count as f64).sqrt()
}

fn validate_extremes(p_min: f64, p_max: f64) -> Result<(), AnalysisError> {
    let ok = p_min.is_finite() && p_max.is_finite() && p_min >= 0.0 && p_max > 0.0 && p_min <= p_max;
    if ok {
        Ok(())
    } else {
        Err(AnalysisError::InvalidExtremes { p_min, p_max })
    }
}

/// Replaces the measured coincidence minimum by
/// `i_min − i_max·(p_min/p_max)`, subtracting the theoretically predicted
/// finite-slit-width floor.  The result may be negative; it is reported,
/// not clamped.
pub fn compensated_minimum(
    i_min: u64,
    i_max: u64,
    p_min: f64,
    p_max: f64,
) -> Result<f64, AnalysisError> {
    if i_max == 0 {
        return Err(AnalysisError::ZeroMaxCount);
    }
    validate_extremes(p_min, p_max)?;
    Ok(i_min as f64 - i_max as f64 * (p_min / p_max))
}

/// Propagated Poisson sigma of the violation statistic under the chosen
/// convention.
pub fn propagate_sigma(
    counts: &CountSet,
    p_min: f64,
    p_max: f64,
    convention: SigmaConvention,
) -> Result<f64, AnalysisError> {
    validate_extremes(p_min, p_max)?;
    let base = (counts.i13 + counts.i12 + counts.i23 + counts.i_min) as f64;
    let max_term = match convention {
        SigmaConvention::Scaled => {
            let ratio = p_min / p_max;
            ratio * ratio * counts.i_max as f64
        }
        SigmaConvention::Unscaled => counts.i_max as f64,
    };
    Ok((base + max_term).sqrt())
}

/// Conditions worth surfacing alongside the numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFlag {
    /// Every count is zero; nothing can be inferred.
    DegenerateInput,
    /// The predicted floor exceeds the measured minimum.
    NegativeCompensatedMinimum,
}

/// The evaluated intensity inequality.  `violation > 0` contradicts local
/// realism under the stated assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub counts: CountSet,
    pub p_min: f64,
    pub p_max: f64,
    pub convention: SigmaConvention,
    pub compensated_min: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
    pub sigma: f64,
    pub significance: f64,
    pub flags: Vec<ReportFlag>,
}

/// Evaluates `I13 − compensated_min ≤ I12 + I23` on the measured counts.
pub fn evaluate_violation(
    counts: &CountSet,
    p_min: f64,
    p_max: f64,
    convention: SigmaConvention,
) -> Result<ViolationReport, AnalysisError> {
    if counts.i_min > counts.i_max {
        return Err(AnalysisError::CountOrder { i_min: counts.i_min, i_max: counts.i_max });
    }
    let mut flags = Vec::new();
    let compensated_min = if counts.total() == 0 {
        flags.push(ReportFlag::DegenerateInput);
        validate_extremes(p_min, p_max)?;
        0.0
    } else {
        compensated_minimum(counts.i_min, counts.i_max, p_min, p_max)?
    };
    if compensated_min < 0.0 {
        flags.push(ReportFlag::NegativeCompensatedMinimum);
    }
    let lhs = counts.i13 as f64 - compensated_min;
    let rhs = (counts.i12 + counts.i23) as f64;
    let violation = lhs - rhs;
    let sigma = propagate_sigma(counts, p_min, p_max, convention)?;
    let significance = if sigma > 0.0 { violation / sigma } else { 0.0 };
    Ok(ViolationReport {
        counts: *counts,
        p_min,
        p_max,
        convention,
        compensated_min,
        lhs,
        rhs,
        violation,
        sigma,
        significance,
        flags,
    })
}

/// Violation in units of its propagated sigma.
pub fn significance(report: &ViolationReport) -> Result<f64, AnalysisError> {
    if report.sigma == 0.0 {
        return Err(AnalysisError::ZeroSigma);
    }
    Ok(report.violation / report.sigma)
}

/// Slit-wheel geometry needed to predict the coincidence extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WheelGeometry {
    /// OAM quantum number of the entangled state; TOML key `l`.
    #[serde(rename = "l")]
    pub oam: u32,
    pub slit_width_fraction: f64,
}

/// Measurement angles of the three settings, in degrees of wheel rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSettings {
    #[serde(rename = "phi1")]
    pub phi1_deg: f64,
    #[serde(rename = "phi2")]
    pub phi2_deg: f64,
    #[serde(rename = "phi3")]
    pub phi3_deg: f64,
}

/// Raw replacement values for the predicted extremes, for reproduction runs
/// that quote rounded numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeOverrides {
    pub p_min: f64,
    pub p_max: f64,
}

/// Published values shipped with a dataset, used to annotate reproduction
/// runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub violation: f64,
    pub sigma: f64,
}

/// Acquisition metadata.  A single shared integration time is required;
/// per-setting lists are accepted only when every entry is equal, because
/// rescaling counts would silently change their Poisson statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntegrationTime {
    Shared(f64),
    PerSetting(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub integration_time_s: IntegrationTime,
}

/// A parsed and validated measurement dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisInput {
    pub counts: CountSet,
    pub wheel: WheelGeometry,
    pub angles: AngleSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<ExtremeOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<RunMeta>,
}

#[derive(Debug, Deserialize)]
struct RawCounts {
    i13: i64,
    i12: i64,
    i23: i64,
    i_min: i64,
    i_max: i64,
}

#[derive(Debug, Deserialize)]
struct RawInput {
    counts: RawCounts,
    wheel: WheelGeometry,
    angles: AngleSettings,
    #[serde(default)]
    overrides: Option<ExtremeOverrides>,
    #[serde(default)]
    reference: Option<ReferenceValues>,
    #[serde(default)]
    meta: Option<RunMeta>,
}

fn invalid(path: &str, field: &str, message: impl Into<String>) -> IngestError {
    IngestError::Invalid { path: path.to_string(), field: field.to_string(), message: message.into() }
}

fn validate_input(raw: RawInput, path: &str) -> Result<AnalysisInput, IngestError> {
    let counts = {
        let fields = [
            ("counts.i13", raw.counts.i13),
            ("counts.i12", raw.counts.i12),
            ("counts.i23", raw.counts.i23),
            ("counts.i_min", raw.counts.i_min),
            ("counts.i_max", raw.counts.i_max),
        ];
        for (field, value) in fields {
            if value < 0 {
                return Err(invalid(path, field, format!("count is negative ({value})")));
            }
        }
        CountSet::new(
            raw.counts.i13 as u64,
            raw.counts.i12 as u64,
            raw.counts.i23 as u64,
            raw.counts.i_min as u64,
            raw.counts.i_max as u64,
        )
        .map_err(|e| invalid(path, "counts.i_min", e.to_string()))?
    };
    if raw.wheel.oam < 1 {
        return Err(invalid(path, "wheel.l", "OAM quantum number must be at least 1"));
    }
    if !(raw.wheel.slit_width_fraction > 0.0 && raw.wheel.slit_width_fraction < 1.0) {
        return Err(invalid(
            path,
            "wheel.slit_width_fraction",
            format!("must lie strictly between 0 and 1, got {}", raw.wheel.slit_width_fraction),
        ));
    }
    for (field, value) in [
        ("angles.phi1", raw.angles.phi1_deg),
        ("angles.phi2", raw.angles.phi2_deg),
        ("angles.phi3", raw.angles.phi3_deg),
    ] {
        if !value.is_finite() {
            return Err(invalid(path, field, format!("angle must be finite, got {value}")));
        }
    }
    if let Some(overrides) = &raw.overrides {
        validate_extremes(overrides.p_min, overrides.p_max)
            .map_err(|e| invalid(path, "overrides", e.to_string()))?;
    }
    if let Some(meta) = &raw.meta {
        match &meta.integration_time_s {
            IntegrationTime::Shared(t) if *t > 0.0 => {}
            IntegrationTime::Shared(t) => {
                return Err(invalid(
                    path,
                    "meta.integration_time_s",
                    format!("must be positive, got {t}"),
                ));
            }
            IntegrationTime::PerSetting(times) => {
                if times.is_empty() || times.iter().any(|t| *t <= 0.0) {
                    return Err(invalid(
                        path,
                        "meta.integration_time_s",
                        "entries must be positive",
                    ));
                }
                if times.windows(2).any(|w| w[0] != w[1]) {
                    return Err(invalid(
                        path,
                        "meta.integration_time_s",
                        format!("unequal integration times {times:?} are rejected, not rescaled"),
                    ));
                }
            }
        }
    }
    Ok(AnalysisInput {
        counts,
        wheel: raw.wheel,
        angles: raw.angles,
        overrides: raw.overrides,
        reference: raw.reference,
        meta: raw.meta,
    })
}

/// Parses `key,value` lines (dotted keys, `#` comments) into a TOML table.
fn csv_to_table(text: &str, path: &str) -> Result<toml::Table, IngestError> {
    let mut root = toml::Table::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once(',').ok_or_else(|| IngestError::Csv {
            path: path.to_string(),
            line: line_no,
            message: format!("expected \"key,value\", got {trimmed:?}"),
        })?;
        let mut table = &mut root;
        let segments: Vec<&str> = key.trim().split('.').collect();
        let (last, parents) = segments.split_last().ok_or_else(|| IngestError::Csv {
            path: path.to_string(),
            line: line_no,
            message: "empty key".to_string(),
        })?;
        for segment in parents {
            table = table
                .entry(segment.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| IngestError::Csv {
                    path: path.to_string(),
                    line: line_no,
                    message: format!("key {key:?} conflicts with an earlier scalar"),
                })?;
        }
        let value = value.trim();
        let parsed = value
            .parse::<i64>()
            .map(toml::Value::Integer)
            .or_else(|_| value.parse::<f64>().map(toml::Value::Float))
            .unwrap_or_else(|_| toml::Value::String(value.to_string()));
        table.insert(last.to_string(), parsed);
    }
    Ok(root)
}

/// Reads and validates a dataset from a TOML file (or a two-column CSV of
/// dotted keys when the extension is `.csv`).
pub fn ingest_counts(path: &Path) -> Result<AnalysisInput, IngestError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let is_csv = path.extension().map(|e| e.eq_ignore_ascii_case("csv")).unwrap_or(false);
    ingest_counts_str(&text, is_csv, &display)
}

/// Parses a dataset from text; `is_csv` selects the two-column format.
pub fn ingest_counts_str(
    text: &str,
    is_csv: bool,
    path: &str,
) -> Result<AnalysisInput, IngestError> {
    let raw: RawInput = if is_csv {
        let table = csv_to_table(text, path)?;
        table
            .try_into()
            .map_err(|e: toml::de::Error| IngestError::Parse { path: path.to_string(), message: e.to_string() })?
    } else {
        toml::from_str(text)
            .map_err(|e| IngestError::Parse { path: path.to_string(), message: e.to_string() })?
    };
    validate_input(raw, path)
}

/// Where the predicted extremes in a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremesSource {
    /// Computed from the wheel geometry via the closed form.
    Computed,
    /// Taken verbatim from the dataset's overrides.
    Override,
}

/// How the verdict moves when the computed extremes are rounded the way
/// quoted values usually are.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityNote {
    pub rounded_p_min: f64,
    pub rounded_p_max: f64,
    pub violation_with_rounded: f64,
}

/// Full pipeline output: the echoed input plus the evaluated report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: AnalysisInput,
    pub p_source: ExtremesSource,
    #[serde(flatten)]
    pub report: ViolationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityNote>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Runs ingest output through the full evaluation: extremes from the
/// overrides when present, otherwise from the wheel geometry.
pub fn analyze(
    input: &AnalysisInput,
    convention: SigmaConvention,
) -> Result<AnalysisReport, AnalysisError> {
    let (p_min, p_max, p_source) = match &input.overrides {
        Some(overrides) => (overrides.p_min, overrides.p_max, ExtremesSource::Override),
        None => {
            let (p_min, p_max) =
                slitwheel_extremes(input.wheel.oam, input.wheel.slit_width_fraction)?;
            (p_min, p_max, ExtremesSource::Computed)
        }
    };
    let report = evaluate_violation(&input.counts, p_min, p_max, convention)?;
    let mut notes = Vec::new();

    // Rounding the extremes to three decimals moves the headline number;
    // surface the size of that effect whenever the full-precision path is
    // taken.
    let sensitivity = if p_source == ExtremesSource::Computed {
        let rounded_p_min = (p_min * 1000.0).round() / 1000.0;
        let rounded_p_max = (p_max * 1000.0).round() / 1000.0;
        let rounded = evaluate_violation(&input.counts, rounded_p_min, rounded_p_max, convention)?;
        notes.push(format!(
            "violation {:.1} uses full-precision extremes; rounding them to three decimals \
             ({rounded_p_min:.3}/{rounded_p_max:.3}) gives {:.1}",
            report.violation, rounded.violation,
        ));
        Some(SensitivityNote {
            rounded_p_min,
            rounded_p_max,
            violation_with_rounded: rounded.violation,
        })
    } else {
        None
    };
    if let Some(reference) = &input.reference {
        notes.push(format!(
            "dataset quotes {} +/- {}; this evaluation gives {:.1} +/- {:.1} with the {} convention",
            reference.violation, reference.sigma, report.violation, report.sigma, convention,
        ));
    }
    Ok(AnalysisReport { input: input.clone(), p_source, report, sensitivity, notes })
}
