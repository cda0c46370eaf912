//! Hedging with the trivial test.
//!
//! Performing the identity test with probability `p` maps every non-target
//! eigenvalue `v` to `p + (1 − p)v`. This lifts a singular or nearly singular
//! operator out of the regime where adversarial test counts scale as `1/δ`,
//! at the price of a smaller spectral gap. The cost constant
//! `h(p, ν, τ) = 1/min{β_p ln β_p⁻¹, τ_p ln τ_p⁻¹}` controls the adversarial
//! count `N < h ε⁻¹ ln(Fδ)⁻¹`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{check_half_open, check_unit_left, QsvError, Result};
use crate::nonadversarial::Precision;
use crate::numeric::xlog_inv;

/// Bisection width for the optimal hedging probability.
pub const P_STAR_TOL: f64 = 1e-12;

const HOMOGENEOUS_TOL: f64 = 1e-12;

fn validate(nu: f64, tau: f64) -> Result<()> {
    check_half_open("nu", nu)?;
    check_unit_left("tau", tau)?;
    if tau > 1.0 - nu + HOMOGENEOUS_TOL {
        return Err(QsvError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1 - nu]",
        });
    }
    Ok(())
}

/// `(β_p, τ_p)` for the hedged operator.
pub fn hedged_extremes(p: f64, nu: f64, tau: f64) -> (f64, f64) {
    let beta = 1.0 - nu;
    (p + (1.0 - p) * beta, p + (1.0 - p) * tau)
}

/// `h(p, ν, τ)`. Fails with [`QsvError::HedgeRequired`] when `τ_p = 0`.
pub fn h_of(p: f64, nu: f64, tau: f64) -> Result<f64> {
    check_unit_left("p", p)?;
    validate(nu, tau)?;
    let (beta_p, tau_p) = hedged_extremes(p, nu, tau);
    if tau_p <= 0.0 || beta_p <= 0.0 {
        return Err(QsvError::HedgeRequired);
    }
    Ok(1.0 / xlog_inv(beta_p).min(xlog_inv(tau_p)))
}

fn p_star_feasible(p: f64, nu: f64, tau: f64) -> bool {
    let (beta_p, tau_p) = hedged_extremes(p, nu, tau);
    beta_p >= 1.0 / E && xlog_inv(tau_p) >= xlog_inv(beta_p)
}

/// Smallest `p ≥ 0` with `β_p ≥ 1/e` and `τ_p ln τ_p⁻¹ ≥ β_p ln β_p⁻¹`, by
/// bisection on the feasibility indicator.
///
/// Past `β_p = 1/e` the margin `τ_p ln τ_p⁻¹ − β_p ln β_p⁻¹` only grows with
/// `p`, so the feasible set is an interval `[p*, 1)`.
pub fn p_star_bisect(nu: f64, tau: f64) -> Result<f64> {
    validate(nu, tau)?;
    if p_star_feasible(0.0, nu, tau) {
        return Ok(0.0);
    }
    let tau = tau.min(1.0 - nu);
    // Once τ_p ≥ 1/e both eigenvalues sit where x ln x⁻¹ decreases.
    let mut hi = ((1.0 / E - tau) / (1.0 - tau)).max(0.0);
    while !p_star_feasible(hi, nu, tau) {
        hi = 0.5 * (hi + 1.0);
    }
    let mut lo = 0.0;
    while hi - lo > P_STAR_TOL {
        let mid = 0.5 * (lo + hi);
        if p_star_feasible(mid, nu, tau) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Optimal hedging probability `p*(ν, τ)`. Homogeneous operators
/// (`τ = 1 − ν`) use the closed form.
pub fn p_star(nu: f64, tau: f64) -> Result<f64> {
    validate(nu, tau)?;
    if (tau - (1.0 - nu)).abs() <= HOMOGENEOUS_TOL {
        return Ok(p_star_homogeneous(nu));
    }
    p_star_bisect(nu, tau)
}

/// `(eν − e + 1)/(eν)` if `ν ≥ 1 − 1/e`, else 0.
pub fn p_star_homogeneous(nu: f64) -> f64 {
    if nu >= 1.0 - 1.0 / E {
        (E * nu - E + 1.0) / (E * nu)
    } else {
        0.0
    }
}

/// `p*(ν) = p*(ν, 0)`, the largest optimal hedge over all `τ`.
pub fn p_star_max(nu: f64) -> Result<f64> {
    p_star(nu, 0.0)
}

/// `h(ν/e, ν, 0)`, the τ-free cost constant.
pub fn h_tau_free(nu: f64) -> Result<f64> {
    h_of(nu / E, nu, 0.0)
}

/// `ν h(ν/e, ν, 0)`, the high-precision overhead factor over the
/// nonadversarial count. Lies in `(1, e]`.
pub fn nu_h(nu: f64) -> Result<f64> {
    Ok(nu * h_tau_free(nu)?)
}

/// `ν h [ln(1 − νε)⁻¹] ln(Fδ) / (νε ln δ)` for a given cost constant `h`.
fn ratio_with_h(precision: Precision, nu: f64, h: f64) -> f64 {
    let Precision { epsilon, delta } = precision;
    let f = precision.fidelity();
    nu * h * (-(-nu * epsilon).ln_1p()) * (f * delta).ln() / (nu * epsilon * delta.ln())
}

/// Bound on `N(ε, δ, Ω_p) / N_na(ε, δ, Ω)`.
pub fn overhead_ratio_bound(precision: Precision, nu: f64, tau: f64, p: f64) -> Result<f64> {
    Ok(ratio_with_h(precision, nu, h_of(p, nu, tau)?))
}

/// How the hedging probability is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeChoice {
    /// `p = ν/e`, which needs no knowledge of `τ`.
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeReport {
    pub p: f64,
    pub beta_p: f64,
    pub tau_p: f64,
    /// `h(p, ν, τ)` at the chosen `p`.
    pub h_value: f64,
    pub p_star: f64,
    pub p_star_max: f64,
    pub nu_h: f64,
    /// Strict upper bound on the adversarial test count.
    pub n_bound: f64,
    /// Looser closed form `ln(Fδ)⁻¹ / [(1 − ν + ν²/e)νε]`, present only when
    /// the τ-free guarantee applies.
    pub n_bound_secondary: Option<f64>,
    pub ratio_bound: f64,
    /// `p = ν/e` or `p*(ν, τ) ≤ p ≤ p*(ν)`. When false, `n_bound` and
    /// `ratio_bound` use `h(p, ν, τ)` instead of `h(ν/e, ν, 0)`.
    pub tau_free_guarantee: bool,
}

/// Whether `p` is one of the choices covered by the τ-free guarantee.
pub fn tau_free_choice(p: f64, nu: f64, tau: f64) -> Result<bool> {
    let slack = 10.0 * P_STAR_TOL;
    Ok((p - nu / E).abs() <= slack
        || (p_star(nu, tau)? - slack <= p && p <= p_star_max(nu)? + slack))
}

pub fn hedged_plan(
    precision: Precision,
    nu: f64,
    tau: f64,
    choice: HedgeChoice,
) -> Result<HedgeReport> {
    validate(nu, tau)?;
    let p = match choice {
        HedgeChoice::Auto => nu / E,
        HedgeChoice::Explicit(p) => p,
    };
    let h_value = h_of(p, nu, tau)?;
    let (beta_p, tau_p) = hedged_extremes(p, nu, tau);
    let guaranteed = tau_free_choice(p, nu, tau)?;
    let h_bound = if guaranteed { h_tau_free(nu)? } else { h_value };

    let Precision { epsilon, delta } = precision;
    let log_inv = (1.0 / (precision.fidelity() * delta)).ln();
    Ok(HedgeReport {
        p,
        beta_p,
        tau_p,
        h_value,
        p_star: p_star(nu, tau)?,
        p_star_max: p_star_max(nu)?,
        nu_h: nu_h(nu)?,
        n_bound: h_bound * log_inv / epsilon,
        n_bound_secondary: guaranteed
            .then(|| log_inv / ((1.0 - nu + nu * nu / E) * nu * epsilon)),
        ratio_bound: ratio_with_h(precision, nu, h_bound),
        tau_free_guarantee: guaranteed,
    })
}
