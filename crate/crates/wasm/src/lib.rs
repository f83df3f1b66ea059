//! Browser bindings for the demo page.  All physics lives in wigner-core;
//! this crate only flattens results into `Vec<f64>` buffers (surfaced as
//! Float64Array in JS).  The plain [`api`] layer is target-independent and
//! unit-tested natively; the wasm-bindgen exports wrap it on wasm32.

pub mod api;

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn err_to_js(message: String) -> JsValue {
        JsValue::from_str(&message)
    }

    /// One closed-form fringe period for the `|l,−l⟩ + |−l,l⟩` state behind
    /// slit wheels, flattened as `[phi_o, p, phi_o, p, ...]`.
    #[wasm_bindgen]
    pub fn fringe_curve(l: u32, slit_width: f64, n_points: u32) -> Result<Vec<f64>, JsValue> {
        crate::api::fringe_curve(l, slit_width, n_points).map_err(err_to_js)
    }

    /// Coincidence extremes `[p_min, p_max]` of the closed form.
    #[wasm_bindgen]
    pub fn slitwheel_extremes(l: u32, slit_width: f64) -> Result<Vec<f64>, JsValue> {
        crate::api::slitwheel_extremes(l, slit_width).map_err(err_to_js)
    }

    /// Singlet evaluation at angles (0, θ2, θ3):
    /// `[p13, p12, p23, p11, lhs, rhs, margin]`; margin > 0 means violation.
    #[wasm_bindgen]
    pub fn singlet_evaluation(theta2_deg: f64, theta3_deg: f64) -> Vec<f64> {
        crate::api::singlet_evaluation(theta2_deg, theta3_deg)
    }

    /// Violation margin along the symmetric slice θ3 = 2·θ2, flattened as
    /// `[theta2, margin, ...]`.
    #[wasm_bindgen]
    pub fn margin_curve(n_points: u32) -> Vec<f64> {
        crate::api::margin_curve(n_points)
    }

    /// The spiked adversarial model:
    /// `[alice1, alice2, alice3, bob1, bob2, bob3, lhs, rhs]`.
    #[wasm_bindgen]
    pub fn adversary_profile(extra: f64) -> Result<Vec<f64>, JsValue> {
        crate::api::adversary_profile(extra).map_err(err_to_js)
    }
}
