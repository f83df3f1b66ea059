//! Quantum-mechanical predictors: the singlet coincidence law and its
//! violation-angle scan, and the slit-wheel coincidence probability for the
//! entangled state `|l,−l⟩ + |−l,l⟩` in closed form and as a numerical
//! quadrature oracle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lhv::InequalityEvaluation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("scan grid step must be in (0, 5] degrees, got {0}")]
    InvalidGridStep(f64),
    #[error("OAM quantum number must be at least 1")]
    OamOutOfRange,
    #[error("slit width fraction must lie strictly between 0 and 1, got {0}")]
    SlitWidthOutOfRange(f64),
    #[error("relative angle must be finite, got {0}")]
    RelativeAngleNotFinite(f64),
    #[error("quadrature needs at least 16 points per slit, got {0}")]
    QuadratureTooCoarse(u32),
    #[error("fringe curve needs at least 2 points, got {0}")]
    TooFewCurvePoints(u32),
    #[error(
        "quadrature did not converge: {points} points give {coarse}, {} points give {fine} \
         (difference {delta:e})",
        points * 2
    )]
    NonConvergence { points: u32, coarse: f64, fine: f64, delta: f64 },
}

/// Three measurement angles for the singlet test, kept in degrees at the
/// interface and converted to radians internally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub theta3_deg: f64,
}

impl AngleTriple {
    pub fn new(theta1_deg: f64, theta2_deg: f64, theta3_deg: f64) -> Self {
        AngleTriple { theta1_deg, theta2_deg, theta3_deg }
    }
}

/// Singlet coincidence probability `sin²(θa − θb)` for positive projections
/// at the two angles (degrees).
pub fn singlet_probability(theta_a_deg: f64, theta_b_deg: f64) -> f64 {
    (theta_a_deg - theta_b_deg).to_radians().sin().powi(2)
}

/// Evaluates the inequality on the singlet state at the given angles.
/// `P11` vanishes identically for the singlet.
pub fn wigner_evaluation(angles: AngleTriple) -> InequalityEvaluation {
    InequalityEvaluation::from_probabilities(
        singlet_probability(angles.theta1_deg, angles.theta3_deg),
        singlet_probability(angles.theta1_deg, angles.theta2_deg),
        singlet_probability(angles.theta2_deg, angles.theta3_deg),
        singlet_probability(angles.theta1_deg, angles.theta1_deg),
    )
}

/// Result of the exhaustive violation scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationScan {
    pub best: AngleTriple,
    pub margin: f64,
    pub evaluated: usize,
}

/// Exhaustive grid scan of θ2, θ3 over [0°, 180°) with θ1 pinned at 0°
/// (global phase freedom), maximizing the violation `lhs − rhs`.  Ties keep
/// the first maximizer in scan order, so the mirror-symmetric partner of a
/// maximum is not returned.
pub fn max_violation_scan(grid_step_deg: f64) -> Result<ViolationScan, QuantumError> {
    if !(grid_step_deg > 0.0 && grid_step_deg <= 5.0) {
        return Err(QuantumError::InvalidGridStep(grid_step_deg));
    }
    // Mirror-symmetric maximizers (θ2,θ3) → (180−θ2, 180−θ3) tie up to
    // rounding; the tolerance keeps the first representative in scan order.
    const TIE_TOLERANCE: f64 = 1e-9;
    let steps = (180.0 / grid_step_deg).ceil() as usize;
    let mut best = AngleTriple::new(0.0, 0.0, 0.0);
    let mut best_margin = f64::NEG_INFINITY;
    let mut evaluated = 0;
    for i in 0..steps {
        let theta2 = i as f64 * grid_step_deg;
        if theta2 >= 180.0 {
            break;
        }
        for j in 0..steps {
            let theta3 = j as f64 * grid_step_deg;
            if theta3 >= 180.0 {
                break;
            }
            let angles = AngleTriple::new(0.0, theta2, theta3);
            let margin = wigner_evaluation(angles).margin();
            evaluated += 1;
            if margin > best_margin + TIE_TOLERANCE {
                best_margin = margin;
                best = angles;
            }
        }
    }
    Ok(ViolationScan { best, margin: best_margin, evaluated })
}

/// Coincident intensity `cos²(l(φa − φb))` of the `|l,−l⟩ + |−l,l⟩` state
/// at angular positions `phi_a`, `phi_b` (radians).
pub fn oam_coincidence(oam: u32, phi_a: f64, phi_b: f64) -> f64 {
    (oam as f64 * (phi_a - phi_b)).cos().powi(2)
}

/// Detection model of one slit-wheel pair: absorptive discs with `2l`
/// transparent radial slits in front of bucket detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitWheelConfig {
    /// OAM quantum number `l` (units of ħ) of the `|l,−l⟩ + |−l,l⟩` state.
    pub oam: u32,
    /// Slit width as a fraction of the slit-to-slit distance.
    pub slit_width_fraction: f64,
    /// Relative wheel angle φo in radians; 0 sits at the anti-correlated
    /// minimum (the half-cycle data shift is folded in).
    pub relative_angle_rad: f64,
    /// Gauss-Legendre points per slit per wheel for the numeric path.
    pub quadrature_points: u32,
}

impl SlitWheelConfig {
    pub fn new(
        oam: u32,
        slit_width_fraction: f64,
        relative_angle_rad: f64,
        quadrature_points: u32,
    ) -> Result<Self, QuantumError> {
        if oam < 1 {
            return Err(QuantumError::OamOutOfRange);
        }
        if !(slit_width_fraction > 0.0 && slit_width_fraction < 1.0) {
            return Err(QuantumError::SlitWidthOutOfRange(slit_width_fraction));
        }
        if !relative_angle_rad.is_finite() {
            return Err(QuantumError::RelativeAngleNotFinite(relative_angle_rad));
        }
        if quadrature_points < 16 {
            return Err(QuantumError::QuadratureTooCoarse(quadrature_points));
        }
        Ok(SlitWheelConfig { oam, slit_width_fraction, relative_angle_rad, quadrature_points })
    }
}

/// Closed-form coincidence probability with its extremes over the wheel
/// angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitWheelPrediction {
    /// Probability at the configured relative angle.
    pub p: f64,
    /// Minimum over φo (taken at cos(2lφo) = 1).
    pub p_min: f64,
    /// Maximum over φo (taken at cos(2lφo) = −1).
    pub p_max: f64,
}

/// Closed form `P(φo) = Ws² − cos(2lφo)·sin²(πWs)/π²` of the joint
/// slit-wheel expectation value.
pub fn slitwheel_probability(config: &SlitWheelConfig) -> SlitWheelPrediction {
    let ws = config.slit_width_fraction;
    let ripple = (PI * ws).sin().powi(2) / (PI * PI);
    let phase = (2.0 * config.oam as f64 * config.relative_angle_rad).cos();
    SlitWheelPrediction { p: ws * ws - phase * ripple, p_min: ws * ws - ripple, p_max: ws * ws + ripple }
}

/// Extremes of the closed form for a wheel of the given geometry.
pub fn slitwheel_extremes(oam: u32, slit_width_fraction: f64) -> Result<(f64, f64), QuantumError> {
    let config = SlitWheelConfig::new(oam, slit_width_fraction, 0.0, 64)?;
    let prediction = slitwheel_probability(&config);
    Ok((prediction.p_min, prediction.p_max))
}

/// Numerical-quadrature oracle for the slit-wheel probability: integrates
/// the joint angular density `2cos²(l(φa−φb))/(4π²)` of the entangled state
/// over the union of the `2l` transparent slits of each wheel, Bob's wheel
/// offset by the relative angle minus the half-cycle shift `π/2l`.
///
/// The slit pitch `π/l` matches the period of the integrand, so every slit
/// pair carries the same integral; the quadrature evaluates one pair with a
/// composite Gauss-Legendre product grid and scales by the `(2l)²` pair
/// count.  The result is recomputed at double the point count and an error
/// is returned if the two disagree by more than 1e−8.
pub fn slitwheel_probability_numeric(config: &SlitWheelConfig) -> Result<f64, QuantumError> {
    let coarse = slit_pair_quadrature(config, config.quadrature_points);
    let fine = slit_pair_quadrature(config, config.quadrature_points * 2);
    let delta = (fine - coarse).abs();
    if delta > 1e-8 {
        return Err(QuantumError::NonConvergence {
            points: config.quadrature_points,
            coarse,
            fine,
            delta,
        });
    }
    Ok(fine)
}

fn slit_pair_quadrature(config: &SlitWheelConfig, points: u32) -> f64 {
    let l = config.oam as f64;
    let width = PI * config.slit_width_fraction / l;
    // Alice slit [0, width]; Bob positions start at φo − π/2l.
    let bob_start = config.relative_angle_rad - PI / (2.0 * l);
    let (nodes, weights) = gauss_legendre(points as usize);

    let map = |x: f64, lo: f64, hi: f64| 0.5 * (hi - lo) * x + 0.5 * (hi + lo);
    let scale = 0.5 * width;

    let mut integral = 0.0;
    for (i, &xa) in nodes.iter().enumerate() {
        let phi_a = map(xa, 0.0, width);
        let mut inner = 0.0;
        for (j, &xb) in nodes.iter().enumerate() {
            let phi_b = map(xb, bob_start, bob_start + width);
            inner += weights[j] * oam_coincidence(config.oam, phi_a, phi_b);
        }
        integral += weights[i] * scale * inner;
    }
    integral *= scale;

    let density = 1.0 / (2.0 * PI * PI);
    let pair_count = (2.0 * l) * (2.0 * l);
    pair_count * density * integral
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [−1, 1],
/// computed by Newton iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (value, slope) = legendre_with_derivative(n, x);
            derivative = slope;
            let step = value / slope;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
    }
    // The Chebyshev seeds run from +1 toward −1; report ascending nodes.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut previous = 1.0;
    let mut current = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * current - (k - 1.0) * previous) / k;
        previous = current;
        current = next;
    }
    let derivative = n as f64 * (x * current - previous) / (x * x - 1.0);
    (current, derivative)
}

/// One period of the closed-form fringe: `n_points` samples of
/// `(φo, P(φo))` uniformly over φo ∈ [0, π/l], both endpoints included.
pub fn fringe_curve(
    oam: u32,
    slit_width_fraction: f64,
    n_points: u32,
) -> Result<Vec<(f64, f64)>, QuantumError> {
    if n_points < 2 {
        return Err(QuantumError::TooFewCurvePoints(n_points));
    }
    let mut config = SlitWheelConfig::new(oam, slit_width_fraction, 0.0, 64)?;
    let period = PI / oam as f64;
    let mut samples = Vec::with_capacity(n_points as usize);
    for i in 0..n_points {
        let phi = period * i as f64 / (n_points - 1) as f64;
        config.relative_angle_rad = phi;
        samples.push((phi, slitwheel_probability(&config).p));
    }
    Ok(samples)
}

/// Renders a fringe curve as CSV with the header `phi_o_rad,probability`.
pub fn fringe_curve_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("phi_o_rad,probability\n");
    for (phi, p) in samples {
        out.push_str(&format!("{phi},{p}\n"));
    }
    out
}

/// Fringe phase `2lφ` in degrees accumulated by rotating one wheel by
/// `phi_deg`.  Settings spaced by θ/l in wheel angle reproduce the fringe
/// phases of singlet angles spaced by θ; this mapping is an interpretation
/// of the slit-wheel settings, not a measured quantity.
pub fn fringe_phase_deg(oam: u32, phi_deg: f64) -> f64 {
    2.0 * oam as f64 * phi_deg
}
