//! Browser bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function so the numerics can be
//! tested on the host.

use qsv_core::general::fidelity_lower_bound_general;
use qsv_core::hedging::{hedged_plan, HedgeChoice};
use qsv_core::homogeneous::{fidelity_homogeneous, tests_homogeneous};
use qsv_core::nonadversarial::tests_needed_na;
use qsv_core::{Precision, Result};
use wasm_bindgen::prelude::*;

/// Rows of `[λ, n_exact, n_approx, n_nonadversarial]` flattened. `n_approx`
/// is NaN where undefined.
pub fn count_curve(epsilon: f64, delta: f64, lambdas: &[f64]) -> Result<Vec<f64>> {
    let precision = Precision::new(epsilon, delta)?;
    let mut out = Vec::with_capacity(4 * lambdas.len());
    for &lambda in lambdas {
        let plan = tests_homogeneous(precision, lambda)?;
        let na = tests_needed_na(1.0 - lambda, precision)?;
        out.extend([
            lambda,
            plan.n_exact as f64,
            plan.n_approx.unwrap_or(f64::NAN),
            na.n_exact as f64,
        ]);
    }
    Ok(out)
}

/// Rows of `[δ, exact worst-case fidelity, universal lower bound]`.
pub fn fidelity_curve(n: u32, lambda: f64, deltas: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * deltas.len());
    for &delta in deltas {
        let exact = fidelity_homogeneous(n.into(), delta, lambda)?.fidelity;
        let general = fidelity_lower_bound_general(n.into(), delta, 1.0 - lambda)?;
        out.extend([delta, exact, general.display_value()]);
    }
    Ok(out)
}

/// `[p, p*, p*(ν), h(p), νh, n_bound, ratio_bound, guarantee (0/1)]` for
/// `p = ν/e`, or for `p` itself when it is given (not NaN).
pub fn hedge_summary(nu: f64, tau: f64, epsilon: f64, delta: f64, p: f64) -> Result<Vec<f64>> {
    let choice = if p.is_nan() {
        HedgeChoice::Auto
    } else {
        HedgeChoice::Explicit(p)
    };
    let r = hedged_plan(Precision::new(epsilon, delta)?, nu, tau, choice)?;
    Ok(vec![
        r.p,
        r.p_star,
        r.p_star_max,
        r.h_value,
        r.nu_h,
        r.n_bound,
        r.ratio_bound,
        f64::from(u8::from(r.tau_free_guarantee)),
    ])
}

fn js(result: Result<Vec<f64>>) -> std::result::Result<Vec<f64>, JsError> {
    result.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = countCurve)]
pub fn count_curve_js(epsilon: f64, delta: f64, lambdas: &[f64]) -> std::result::Result<Vec<f64>, JsError> {
    js(count_curve(epsilon, delta, lambdas))
}

#[wasm_bindgen(js_name = fidelityCurve)]
pub fn fidelity_curve_js(n: u32, lambda: f64, deltas: &[f64]) -> std::result::Result<Vec<f64>, JsError> {
    js(fidelity_curve(n, lambda, deltas))
}

#[wasm_bindgen(js_name = hedgeSummary)]
pub fn hedge_summary_js(
    nu: f64,
    tau: f64,
    epsilon: f64,
    delta: f64,
    p: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    js(hedge_summary(nu, tau, epsilon, delta, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_rows() {
        let rows = count_curve(0.1, 0.1, &[0.5, 0.0]).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[1], 62.0);
        assert!((rows[2] - 66.4386).abs() < 1e-4);
        assert_eq!(rows[5], 90.0);
        assert!(rows[6].is_nan());
    }

    #[test]
    fn fidelity_rows() {
        let rows = fidelity_curve(2, 0.5, &[0.8, 0.1]).unwrap();
        assert!((rows[1] - 0.75).abs() < 1e-12);
        assert!((rows[2] - 0.75).abs() < 1e-12);
        assert!(rows[5] <= rows[4]);
    }

    #[test]
    fn hedge_row() {
        let r = hedge_summary(1.0, 0.0, 0.1, 0.1, f64::NAN).unwrap();
        assert!((r[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((r[4] - std::f64::consts::E).abs() < 1e-12);
        assert!((r[6] - 2.995).abs() < 1e-3);
        assert_eq!(r[7], 1.0);
        assert!(hedge_summary(0.5, 0.9, 0.1, 0.1, f64::NAN).is_err());
    }
}
