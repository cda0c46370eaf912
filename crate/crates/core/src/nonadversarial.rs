//! Planning for sources that emit independent states.

use serde::{Deserialize, Serialize};

use crate::error::{check_half_open, check_open_unit, check_unit_left, Result};
use crate::numeric::{ceil_guarded, to_count};

/// Target infidelity `ε` and significance level `δ`, both in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub epsilon: f64,
    pub delta: f64,
}

impl Precision {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        check_open_unit("epsilon", epsilon)?;
        check_open_unit("delta", delta)?;
        Ok(Precision { epsilon, delta })
    }

    /// Target fidelity `1 − ε`.
    pub fn fidelity(&self) -> f64 {
        1.0 - self.epsilon
    }
}

/// Minimal test count for an independent source, with its looser closed-form
/// upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaPlan {
    pub n_exact: u64,
    pub n_upper: u64,
}

/// Largest probability that a state with infidelity `ε` passes one test.
pub fn max_pass_probability(nu: f64, epsilon: f64) -> Result<f64> {
    check_half_open("nu", nu)?;
    check_open_unit("epsilon", epsilon)?;
    Ok(1.0 - nu * epsilon)
}

/// Bound `(1 − ν ε̄)^N` on the probability that `N` independent states with
/// average infidelity `ε̄` all pass.
pub fn accept_probability_bound(nu: f64, eps_bar: f64, n: u64) -> Result<f64> {
    check_half_open("nu", nu)?;
    if eps_bar != 1.0 {
        check_unit_left("eps_bar", eps_bar)?;
    }
    let per_test = 1.0 - nu * eps_bar;
    if per_test == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((n as f64 * (-nu * eps_bar).ln_1p()).exp())
}

/// `(1 − νε)^n ≤ δ`, evaluated in log space.
fn rejects_enough(log_pass: f64, n: u64, delta: f64) -> bool {
    n as f64 * log_pass <= delta.ln() + 1e-12 * delta.ln().abs()
}

pub fn tests_needed_na(nu: f64, precision: Precision) -> Result<NaPlan> {
    check_half_open("nu", nu)?;
    let Precision { epsilon, delta } = precision;
    let rate = nu * epsilon;
    let log_pass = (-rate).ln_1p();

    let mut n = to_count(ceil_guarded(delta.ln() / log_pass)).max(1);
    while !rejects_enough(log_pass, n, delta) {
        n += 1;
    }
    while n > 1 && rejects_enough(log_pass, n - 1, delta) {
        n -= 1;
    }

    let n_upper = to_count(ceil_guarded((1.0 / delta).ln() / rate));
    Ok(NaPlan {
        n_exact: n,
        n_upper: n_upper.max(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Smallest `N` with `(1 − νε)^N ≤ δ` by repeated multiplication.
    fn scan_oracle(nu: f64, eps: f64, delta: f64) -> u64 {
        let mut acc = 1.0f64;
        let mut n = 0;
        while acc > delta {
            acc *= 1.0 - nu * eps;
            n += 1;
        }
        n
    }

    #[test]
    fn pass_probability() {
        assert_abs_diff_eq!(max_pass_probability(0.5, 0.2).unwrap(), 0.9);
        assert!(max_pass_probability(1.0, 1.0 - 1e-12).unwrap() < 1e-11);
        assert!(1.0 - max_pass_probability(0.3, 1e-12).unwrap() < 1e-12);
        assert!(max_pass_probability(0.0, 0.1).is_err());
    }

    #[test]
    fn pass_probability_is_max_over_eigenvectors() {
        // σ = (1 − ε)|Ψ⟩⟨Ψ| + ε|v⟩⟨v| for each eigenvector v ⟂ Ψ.
        let (eps, spectrum) = (0.2, [0.5, 0.3, 0.1]);
        let best = spectrum
            .iter()
            .map(|&v| (1.0 - eps) + eps * v)
            .fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(max_pass_probability(0.5, eps).unwrap(), best, epsilon = 1e-15);
    }

    #[test]
    fn acceptance_bound() {
        assert_eq!(accept_probability_bound(0.4, 0.0, 17).unwrap(), 1.0);
        assert_eq!(accept_probability_bound(1.0, 1.0, 5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            accept_probability_bound(0.5, 0.1, 10).unwrap(),
            0.95f64.powi(10),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            accept_probability_bound(0.5, 0.1, 10).unwrap(),
            0.598737,
            epsilon = 1e-6
        );
    }

    #[test]
    fn worked_plans() {
        let plan = tests_needed_na(1.0, Precision::new(0.5, 0.5).unwrap()).unwrap();
        assert_eq!(plan.n_exact, 1);

        let plan = tests_needed_na(0.5, Precision::new(0.01, 0.01).unwrap()).unwrap();
        assert_eq!(plan.n_exact, scan_oracle(0.5, 0.01, 0.01));
        assert_eq!((plan.n_exact, plan.n_upper), (919, 922));

        let plan = tests_needed_na(1.0, Precision::new(0.01, 0.01).unwrap()).unwrap();
        assert_eq!(plan.n_exact, scan_oracle(1.0, 0.01, 0.01));
        assert_eq!(plan.n_exact, 459);
    }

    #[test]
    fn precision_domain() {
        assert!(Precision::new(0.0, 0.5).is_err());
        assert!(Precision::new(0.1, 1.0).is_err());
        assert!(Precision::new(1e-9, 1e-9).is_ok());
    }

    proptest! {
        #[test]
        fn minimal_and_ordered(nu in 0.05f64..=1.0, eps in 0.001f64..0.9, delta in 0.001f64..0.9) {
            let plan = tests_needed_na(nu, Precision::new(eps, delta).unwrap()).unwrap();
            let log_pass = (-nu * eps).ln_1p();
            prop_assert!((plan.n_exact as f64 * log_pass).exp() <= delta * (1.0 + 1e-10));
            if plan.n_exact > 1 {
                prop_assert!(((plan.n_exact - 1) as f64 * log_pass).exp() > delta * (1.0 - 1e-10));
            }
            prop_assert!(plan.n_exact <= plan.n_upper);
        }

        #[test]
        fn monotone_in_parameters(nu in 0.05f64..0.95, eps in 0.001f64..0.5, delta in 0.001f64..0.5, bump in 1.01f64..1.5) {
            let base = tests_needed_na(nu, Precision::new(eps, delta).unwrap()).unwrap().n_exact;
            let more_nu = tests_needed_na((nu * bump).min(1.0), Precision::new(eps, delta).unwrap()).unwrap().n_exact;
            let more_eps = tests_needed_na(nu, Precision::new(eps * bump, delta).unwrap()).unwrap().n_exact;
            let more_delta = tests_needed_na(nu, Precision::new(eps, delta * bump).unwrap()).unwrap().n_exact;
            prop_assert!(more_nu <= base);
            prop_assert!(more_eps <= base);
            prop_assert!(more_delta <= base);
        }
    }
}
