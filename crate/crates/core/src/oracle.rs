//! Brute-force adversary over permutation-symmetric eigenbasis product
//! states.
//!
//! A configuration places `counts[i]` of the `N + 1` copies in an eigenvector
//! of the `i`-th distinct eigenvalue (index 0 is the target). One copy chosen
//! uniformly at random is left untested. A mixture of configurations is a
//! permutation-invariant adversary; minimizing the conditional fidelity
//! `Σ q f / Σ q p` subject to `Σ q p ≥ δ` is a linear-fractional program
//! whose optimum sits on a vertex of the feasible polytope: either a single
//! configuration or a pair mixed so the pass constraint is tight. Both kinds
//! are enumerated exhaustively.
//!
//! This module shares no code with the closed forms it checks.

use serde::{Deserialize, Serialize};

use crate::error::{check_half_open, QsvError, Result};
use crate::strategy::EigenSpectrum;

/// Largest `N` for spectra with at most two distinct eigenvalues.
pub const MAX_N_TWO_LEVEL: u64 = 30;
/// Largest `N` for spectra with three or four distinct eigenvalues.
pub const MAX_N_MULTI_LEVEL: u64 = 8;
pub const MAX_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfiguration {
    /// Copies per distinct eigenvalue; `counts[0]` are target copies.
    pub counts: Vec<u64>,
    /// Probability that the `N` tested copies all pass.
    pub pass_prob: f64,
    /// Probability that all tests pass and the untested copy is the target.
    pub fid_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedConfiguration {
    pub configuration: AdversaryConfiguration,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Minimum over the restricted family. Equals the true minimum for
    /// homogeneous strategies; an upper bound on it in general.
    pub min_fidelity: f64,
    pub support: Vec<WeightedConfiguration>,
    pub achieved_pass_prob: f64,
}

fn check_guard(levels: usize, n: u64) -> Result<()> {
    if n == 0 {
        return Err(QsvError::Domain {
            name: "N",
            value: 0.0,
            domain: "N ≥ 1",
        });
    }
    if levels > MAX_LEVELS {
        return Err(QsvError::Guard(format!(
            "{levels} distinct eigenvalues (at most {MAX_LEVELS})"
        )));
    }
    let cap = if levels <= 2 {
        MAX_N_TWO_LEVEL
    } else {
        MAX_N_MULTI_LEVEL
    };
    if n > cap {
        return Err(QsvError::Guard(format!(
            "N = {n} exceeds {cap} for {levels} distinct eigenvalues"
        )));
    }
    Ok(())
}

fn product_skipping(values: &[f64], counts: &[u64], skip: Option<usize>) -> f64 {
    values
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(j, (&v, &c))| {
            let e = if Some(j) == skip { c - 1 } else { c };
            v.powi(e as i32)
        })
        .product()
}

fn configuration(values: &[f64], counts: Vec<u64>) -> AdversaryConfiguration {
    let total = counts.iter().sum::<u64>() as f64;
    let pass_prob = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(i, &c)| c as f64 / total * product_skipping(values, &counts, Some(i)))
        .sum();
    let fid_prob = if counts[0] > 0 {
        counts[0] as f64 / total * product_skipping(values, &counts, Some(0))
    } else {
        0.0
    };
    AdversaryConfiguration {
        counts,
        pass_prob,
        fid_prob,
    }
}

fn compositions(total: u64, parts: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Every composition of `N + 1` over the distinct eigenvalues.
pub fn enumerate_configurations(
    spectrum: &EigenSpectrum,
    n: u64,
) -> Result<Vec<AdversaryConfiguration>> {
    let values = spectrum.values();
    check_guard(values.len(), n)?;
    let mut all = Vec::new();
    compositions(n + 1, values.len(), &mut Vec::new(), &mut all);
    Ok(all
        .into_iter()
        .map(|counts| configuration(&values, counts))
        .collect())
}

/// Exact minimum of the conditional fidelity over mixtures of
/// configurations that pass with probability at least `δ`.
pub fn min_fidelity_lp(spectrum: &EigenSpectrum, n: u64, delta: f64) -> Result<OracleResult> {
    check_half_open("delta", delta)?;
    let configs = enumerate_configurations(spectrum, n)?;

    let (passing, failing): (Vec<_>, Vec<_>) = configs.iter().partition(|c| c.pass_prob >= delta);
    if passing.is_empty() {
        return Err(QsvError::Infeasible(format!(
            "no configuration passes with probability {delta}"
        )));
    }

    let mut best: Option<OracleResult> = None;
    let mut offer = |candidate: OracleResult| {
        if best
            .as_ref()
            .is_none_or(|b| candidate.min_fidelity < b.min_fidelity)
        {
            best = Some(candidate);
        }
    };

    for &c in &passing {
        offer(OracleResult {
            min_fidelity: c.fid_prob / c.pass_prob,
            support: vec![WeightedConfiguration {
                configuration: c.clone(),
                weight: 1.0,
            }],
            achieved_pass_prob: c.pass_prob,
        });
    }
    for &a in &passing {
        for &b in &failing {
            let q = (delta - b.pass_prob) / (a.pass_prob - b.pass_prob);
            let pass = q * a.pass_prob + (1.0 - q) * b.pass_prob;
            let fid = q * a.fid_prob + (1.0 - q) * b.fid_prob;
            offer(OracleResult {
                min_fidelity: fid / pass,
                support: vec![
                    WeightedConfiguration {
                        configuration: a.clone(),
                        weight: q,
                    },
                    WeightedConfiguration {
                        configuration: b.clone(),
                        weight: 1.0 - q,
                    },
                ],
                achieved_pass_prob: pass,
            });
        }
    }
    Ok(best.expect("at least one passing configuration"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn homogeneous(lambda: f64) -> EigenSpectrum {
        EigenSpectrum::new(vec![(1.0, 1), (lambda, 3)]).unwrap()
    }

    #[test]
    fn two_level_pass_probabilities() {
        let lambda: f64 = 0.4;
        let configs = enumerate_configurations(&homogeneous(lambda), 2).unwrap();
        assert_eq!(configs.len(), 4);
        for c in &configs {
            let k = c.counts[1] as i32;
            let expected = ((3 - k) as f64 * lambda.powi(k)
                + if k > 0 { k as f64 * lambda.powi(k - 1) } else { 0.0 })
                / 3.0;
            assert_abs_diff_eq!(c.pass_prob, expected, epsilon = 1e-15);
            assert!(0.0 <= c.fid_prob && c.fid_prob <= c.pass_prob && c.pass_prob <= 1.0);
        }
    }

    #[test]
    fn singular_single_bad_copy() {
        let configs = enumerate_configurations(&homogeneous(0.0), 10).unwrap();
        let one_bad = configs.iter().find(|c| c.counts == [10, 1]).unwrap();
        assert_abs_diff_eq!(one_bad.pass_prob, 1.0 / 11.0, epsilon = 1e-15);
        assert_eq!(one_bad.fid_prob, 0.0);
        let all_target = configs.iter().find(|c| c.counts == [11, 0]).unwrap();
        assert_eq!((all_target.pass_prob, all_target.fid_prob), (1.0, 1.0));
    }

    #[test]
    fn worked_minima() {
        let r = min_fidelity_lp(&homogeneous(0.5), 2, 0.8).unwrap();
        assert_abs_diff_eq!(r.min_fidelity, 0.75, epsilon = 1e-12);

        let r = min_fidelity_lp(&homogeneous(0.0), 10, 0.5).unwrap();
        assert_abs_diff_eq!(r.min_fidelity, 0.9, epsilon = 1e-12);
        let mut counts: Vec<_> = r.support.iter().map(|w| w.configuration.counts[1]).collect();
        counts.sort();
        assert_eq!(counts, [0, 1]);
        assert!(r.achieved_pass_prob >= 0.5 - 1e-12);
        let total: f64 = r.support.iter().map(|w| w.weight).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_approaches_one_near_full_pass() {
        let r = min_fidelity_lp(&homogeneous(0.3), 5, 1.0 - 1e-9).unwrap();
        assert!(r.min_fidelity > 1.0 - 1e-7);
        assert_eq!(min_fidelity_lp(&homogeneous(0.3), 5, 1.0).unwrap().min_fidelity, 1.0);
    }

    #[test]
    fn guards() {
        let three = EigenSpectrum::new(vec![(1.0, 1), (0.5, 1), (0.2, 1)]).unwrap();
        assert!(enumerate_configurations(&three, 8).is_ok());
        assert!(matches!(enumerate_configurations(&three, 9), Err(QsvError::Guard(_))));
        assert!(matches!(
            enumerate_configurations(&homogeneous(0.5), 31),
            Err(QsvError::Guard(_))
        ));
        let five =
            EigenSpectrum::new(vec![(1.0, 1), (0.8, 1), (0.6, 1), (0.4, 1), (0.2, 1)]).unwrap();
        assert!(matches!(enumerate_configurations(&five, 1), Err(QsvError::Guard(_))));
        assert!(min_fidelity_lp(&homogeneous(0.5), 2, 1.5).is_err());
    }

    #[test]
    fn min_fidelity_nondecreasing_in_delta() {
        let s = EigenSpectrum::new(vec![(1.0, 1), (0.6, 2), (0.1, 1)]).unwrap();
        let mut last = 0.0;
        for i in 1..=40 {
            let f = min_fidelity_lp(&s, 6, i as f64 / 40.0).unwrap().min_fidelity;
            assert!(f >= last - 1e-12);
            last = f;
        }
    }
}
