//! Exact adversarial results for homogeneous strategies
//! `Ω = |Ψ⟩⟨Ψ| + λ(1 − |Ψ⟩⟨Ψ|)`.
//!
//! The adversary's best attack mixes two permutation-symmetric product
//! configurations: `k` copies orthogonal to the target and `k + 1` copies,
//! with `k` the largest count whose pass probability still reaches `δ`. The
//! functions here evaluate the resulting closed forms and the test count they
//! imply. Every integer produced from a closed form is re-checked against
//! its defining inequality.

use serde::{Deserialize, Serialize};

use crate::error::{check_half_open, check_open_unit, check_unit_left, QsvError, Result};
use crate::nonadversarial::Precision;
use crate::numeric::{ceil_guarded, floor_guarded, meets, pow_int, to_count};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    /// Worst-case fidelity of the untested copy given that all tests passed.
    pub fidelity: f64,
    /// Largest number of bad copies whose pass probability reaches `δ`.
    /// `None` for `λ = 0` and in the zero regime.
    pub k_star: Option<u64>,
    /// `δ ≤ λ^N`: the adversary can pass with probability `δ` while leaving
    /// no overlap with the target.
    pub zero_regime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPlan {
    pub n_exact: u64,
    /// Minimizing `k` for the test-count expression.
    pub k_opt: u64,
    /// Closed-form lower bound. `None` for `λ = 0`.
    pub n_lower: Option<u64>,
    /// Closed-form upper bound. `None` for `λ = 0`.
    pub n_upper: Option<u64>,
    /// High-precision approximation `ln δ / (λ ε ln λ)`. `None` for `λ = 0`.
    pub n_approx: Option<f64>,
}

/// `F(N, δ, λ = 0) = max{0, ((N + 1)δ − 1)/(Nδ)}`.
pub fn fidelity_singular(n: u64, delta: f64) -> Result<f64> {
    check_positive(n)?;
    check_half_open("delta", delta)?;
    let n = n as f64;
    Ok((((n + 1.0) * delta - 1.0) / (n * delta)).max(0.0))
}

/// `⌈(1 − δ)/(εδ)⌉`, the exact count for `λ = 0`.
pub fn tests_singular(precision: Precision) -> u64 {
    let Precision { epsilon, delta } = precision;
    let target = precision.fidelity();
    let ok = |n: u64| meets(fidelity_singular(n, delta).unwrap_or(0.0), target);
    let mut n = to_count(ceil_guarded((1.0 - delta) / (epsilon * delta))).max(1);
    while !ok(n) {
        n += 1;
    }
    while n > 1 && ok(n - 1) {
        n -= 1;
    }
    n
}

/// Weighted fidelity of the optimal two-configuration mixture anchored at
/// `k` bad copies; `fidelity = zeta / δ`.
pub fn zeta(n: u64, delta: f64, lambda: f64, k: u64) -> f64 {
    let nu = 1.0 - lambda;
    let (n, kf) = (n as f64, k as f64);
    lambda * (delta * (1.0 + (n - kf) * nu) - pow_int(lambda, k)) / (nu * (kf * nu + n * lambda))
}

/// `⌊log_λ δ⌋` and `⌈log_λ δ⌉`, snapped when `log_λ δ` is an integer.
pub fn log_candidates(delta: f64, lambda: f64) -> (u64, u64) {
    let x = delta.ln() / lambda.ln();
    (to_count(floor_guarded(x)), to_count(ceil_guarded(x)))
}

/// `ln` of the pass probability of the configuration with `k` bad copies
/// among `N + 1`, i.e. `ln{[(N + 1 − k)λ^k + kλ^(k−1)]/(N + 1)}`.
fn log_config_pass(n: u64, lambda: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mixed = lambda + k as f64 * (1.0 - lambda) / (n as f64 + 1.0);
    (k - 1) as f64 * lambda.ln() + mixed.ln()
}

/// Largest `k ≤ N + 1` with `(N + 1 − k)λ^k + kλ^(k−1) ≥ (N + 1)δ`.
fn k_star(n: u64, delta: f64, lambda: f64) -> u64 {
    let ln_delta = delta.ln();
    let sat = |k: u64| log_config_pass(n, lambda, k) >= ln_delta;
    let (_, k_plus) = log_candidates(delta, lambda);
    let mut k = k_plus.min(n + 1);
    while k < n + 1 && sat(k + 1) {
        k += 1;
    }
    while k > 0 && !sat(k) {
        k -= 1;
    }
    k
}

pub fn fidelity_homogeneous(n: u64, delta: f64, lambda: f64) -> Result<FidelityResult> {
    check_positive(n)?;
    check_half_open("delta", delta)?;
    check_unit_left("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok(FidelityResult {
            fidelity: fidelity_singular(n, delta)?,
            k_star: None,
            zero_regime: false,
        });
    }
    if delta <= pow_int(lambda, n) {
        return Ok(FidelityResult {
            fidelity: 0.0,
            k_star: None,
            zero_regime: true,
        });
    }
    let k = k_star(n, delta, lambda);
    let fidelity = (zeta(n, delta, lambda, k) / delta).clamp(0.0, 1.0);
    Ok(FidelityResult {
        fidelity,
        k_star: Some(k),
        zero_regime: false,
    })
}

/// Real-valued test count attached to anchor `k`; the exact count is the
/// ceiling of its minimum over `k`.
pub fn n_tilde(epsilon: f64, delta: f64, lambda: f64, k: u64) -> f64 {
    let nu = 1.0 - lambda;
    let f = 1.0 - epsilon;
    let kf = k as f64;
    (kf * nu * nu * delta * f + pow_int(lambda, k + 1) + lambda * delta * (kf * nu - 1.0))
        / (lambda * nu * delta * epsilon)
}

/// Largest `k` with `δ ≤ λ^k / (1 − ε + λε)`.
fn k_opt(precision: Precision, lambda: f64) -> u64 {
    let Precision { epsilon, delta } = precision;
    let threshold = delta * (1.0 - (1.0 - lambda) * epsilon);
    let sat = |k: u64| threshold <= pow_int(lambda, k);
    let mut k = to_count(floor_guarded(threshold.ln() / lambda.ln()));
    while sat(k + 1) {
        k += 1;
    }
    while k > 0 && !sat(k) {
        k -= 1;
    }
    k
}

pub fn tests_homogeneous(precision: Precision, lambda: f64) -> Result<HomogeneousPlan> {
    check_unit_left("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok(HomogeneousPlan {
            n_exact: tests_singular(precision),
            k_opt: 0,
            n_lower: None,
            n_upper: None,
            n_approx: None,
        });
    }
    let Precision { epsilon, delta } = precision;
    let nu = 1.0 - lambda;
    let f = precision.fidelity();

    let k = k_opt(precision, lambda);
    let ok = |n: u64| {
        fidelity_homogeneous(n, delta, lambda)
            .map(|r| meets(r.fidelity, f))
            .unwrap_or(false)
    };
    let mut n = to_count(ceil_guarded(n_tilde(epsilon, delta, lambda, k))).max(1);
    while !ok(n) {
        n += 1;
    }
    while n > 1 && ok(n - 1) {
        n -= 1;
    }

    let (k_minus, _) = log_candidates(delta, lambda);
    let km = k_minus as f64;
    let n_lower = k_minus + to_count(ceil_guarded(km * f / (lambda * epsilon)));
    let approx = delta.ln() / (lambda * epsilon * lambda.ln());
    let n_upper = to_count(ceil_guarded(approx - nu * km / lambda));

    Ok(HomogeneousPlan {
        n_exact: n,
        k_opt: k,
        n_lower: Some(n_lower),
        n_upper: Some(n_upper),
        n_approx: Some(approx),
    })
}

/// `ln δ⁻¹ / (λ ε ln λ⁻¹)`.
pub fn tests_homogeneous_approx(precision: Precision, lambda: f64) -> Result<f64> {
    check_open_unit("lambda", lambda)?;
    let Precision { epsilon, delta } = precision;
    Ok((1.0 / delta).ln() / (lambda * epsilon * (1.0 / lambda).ln()))
}

fn check_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(QsvError::Domain {
            name: "N",
            value: 0.0,
            domain: "N ≥ 1",
        });
    }
    Ok(())
}
