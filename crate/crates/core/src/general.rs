//! Adversarial bounds for arbitrary verification operators, expressed through
//! the second largest eigenvalue `β` (gap `ν = 1 − β`) and the smallest
//! eigenvalue `τ`.

use serde::{Deserialize, Serialize};

use crate::error::{check_half_open, check_open_unit, QsvError, Result};
use crate::nonadversarial::Precision;
use crate::numeric::{ceil_guarded, floor_guarded, to_count, xlog_inv};

/// Universal lower bound on the conditional fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralBound {
    /// Raw value; negative values are vacuous and must not be read as a
    /// guarantee. Use [`GeneralBound::display_value`] for presentation.
    pub bound: f64,
    /// `δ ≥ (1 + Nβ)/(N + 1)`, where the bound is attained.
    pub saturated: bool,
}

impl GeneralBound {
    pub fn display_value(&self) -> f64 {
        self.bound.max(0.0)
    }

    pub fn is_clamped(&self) -> bool {
        self.bound < 0.0
    }
}

/// `1 − (1 − δ)/(Nνδ)`.
pub fn fidelity_lower_bound_general(n: u64, delta: f64, nu: f64) -> Result<GeneralBound> {
    if n == 0 {
        return Err(QsvError::Domain {
            name: "N",
            value: 0.0,
            domain: "N ≥ 1",
        });
    }
    check_half_open("delta", delta)?;
    check_half_open("nu", nu)?;
    let nf = n as f64;
    let beta = 1.0 - nu;
    Ok(GeneralBound {
        bound: 1.0 - (1.0 - delta) / (nf * nu * delta),
        saturated: delta >= (1.0 + nf * beta) / (nf + 1.0),
    })
}

/// `⌈(1 − δ)/(νδε)⌉`, valid for every operator with gap `ν`.
pub fn tests_upper_bound_general(precision: Precision, nu: f64) -> Result<u64> {
    check_half_open("nu", nu)?;
    let Precision { epsilon, delta } = precision;
    Ok(to_count(ceil_guarded((1.0 - delta) / (nu * delta * epsilon))).max(1))
}

/// Spectral data of a nonsingular operator together with the effective
/// eigenvalue `β̃` that sets the adversarial cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonsingularSummary {
    pub beta: f64,
    pub tau: f64,
    /// `β` if `β ln β⁻¹ ≤ τ ln τ⁻¹`, else `τ`.
    pub beta_tilde: f64,
    /// `1/(β̃ ln β̃⁻¹)`.
    pub h: f64,
}

pub fn nonsingular_summary(beta: f64, tau: f64) -> Result<NonsingularSummary> {
    check_open_unit("beta", beta)?;
    if tau == 0.0 {
        return Err(QsvError::HedgeRequired);
    }
    check_open_unit("tau", tau)?;
    if tau > beta {
        return Err(QsvError::Domain {
            name: "tau",
            value: tau,
            domain: "(0, beta]",
        });
    }
    let beta_tilde = if xlog_inv(beta) <= xlog_inv(tau) {
        beta
    } else {
        tau
    };
    Ok(NonsingularSummary {
        beta,
        tau,
        beta_tilde,
        h: 1.0 / xlog_inv(beta_tilde),
    })
}

/// Lower bound on the conditional fidelity for nonsingular operators:
/// `A/(A − h ln(τδ))` with `A = N + 1 − ln(τδ)/ln β`.
pub fn fidelity_lower_bound_nonsingular(
    n: u64,
    delta: f64,
    summary: &NonsingularSummary,
) -> Result<f64> {
    check_half_open("delta", delta)?;
    let log_td = (summary.tau * delta).ln();
    let a = n as f64 + 1.0 - log_td / summary.beta.ln();
    Ok(a / (a - summary.h * log_td))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonsingularTestBounds {
    /// Lower bound on the minimal test count.
    pub n_lower: u64,
    /// Strict upper bound `h ε⁻¹ ln(Fδ)⁻¹`.
    pub n_upper_strict: f64,
    /// High-precision approximation `h ε⁻¹ ln δ⁻¹`.
    pub n_approx: f64,
}

pub fn tests_bounds_nonsingular(
    precision: Precision,
    summary: &NonsingularSummary,
) -> NonsingularTestBounds {
    let Precision { epsilon, delta } = precision;
    let f = precision.fidelity();
    let bt = summary.beta_tilde;
    let k = to_count(floor_guarded(delta.ln() / bt.ln()));
    let n_lower = k + to_count(ceil_guarded(k as f64 * f / (bt * epsilon)));
    NonsingularTestBounds {
        n_lower,
        n_upper_strict: summary.h * (1.0 / (f * delta)).ln() / epsilon,
        n_approx: summary.h * (1.0 / delta).ln() / epsilon,
    }
}
