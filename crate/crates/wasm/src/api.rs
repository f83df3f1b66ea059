//! Target-independent demo API: flat `Vec<f64>` buffers for plotting.

use wigner_core::lhv::adversarial_hvm;
use wigner_core::quantum::{
    fringe_curve as core_fringe_curve, slitwheel_extremes as core_extremes, wigner_evaluation,
    AngleTriple,
};

/// `n_points` samples of one fringe period, flattened `[phi_o, p, ...]`.
pub fn fringe_curve(l: u32, slit_width: f64, n_points: u32) -> Result<Vec<f64>, String> {
    let samples = core_fringe_curve(l, slit_width, n_points).map_err(|e| e.to_string())?;
    Ok(samples.into_iter().flat_map(|(phi, p)| [phi, p]).collect())
}

/// `[p_min, p_max]` of the closed form for the given wheel geometry.
pub fn slitwheel_extremes(l: u32, slit_width: f64) -> Result<Vec<f64>, String> {
    let (p_min, p_max) = core_extremes(l, slit_width).map_err(|e| e.to_string())?;
    Ok(vec![p_min, p_max])
}

/// Singlet evaluation at angles (0, θ2, θ3):
/// `[p13, p12, p23, p11, lhs, rhs, margin]`; margin > 0 means violation.
pub fn singlet_evaluation(theta2_deg: f64, theta3_deg: f64) -> Vec<f64> {
    let eval = wigner_evaluation(AngleTriple::new(0.0, theta2_deg, theta3_deg));
    vec![eval.p13, eval.p12, eval.p23, eval.p11, eval.lhs, eval.rhs, eval.margin()]
}

/// Margin along the symmetric slice θ3 = 2·θ2 for θ2 in [0°, 180°),
/// flattened `[theta2, margin, ...]`.  Peaks at θ2 = 30° with margin 1/4.
pub fn margin_curve(n_points: u32) -> Vec<f64> {
    let n = n_points.max(2);
    let mut out = Vec::with_capacity(2 * n as usize);
    for i in 0..n {
        let theta2 = 180.0 * i as f64 / n as f64;
        let eval = wigner_evaluation(AngleTriple::new(0.0, theta2, 2.0 * theta2));
        out.push(theta2);
        out.push(eval.margin());
    }
    out
}

/// The spiked adversarial model's six singles, then lhs and rhs of the
/// inequality: `[alice1..3, bob1..3, lhs, rhs]`.
pub fn adversary_profile(extra: f64) -> Result<Vec<f64>, String> {
    let (distribution, profile) = adversarial_hvm(extra).map_err(|e| e.to_string())?;
    let eval = distribution.extended_inequality();
    let mut out = profile.to_vec();
    out.push(eval.lhs);
    out.push(eval.rhs);
    Ok(out)
}
