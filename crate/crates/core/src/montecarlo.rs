//! Reproducible Monte Carlo checks of the acceptance bounds.
//!
//! Each trial owns a ChaCha stream selected by its index, so trial `t` draws
//! the same numbers whatever thread runs it, and per-thread tallies merge by
//! integer addition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::oracle::{AdversaryConfiguration, OracleResult, WeightedConfiguration};
use crate::strategy::{EigenSpectrum, StrategySummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Independent copies with the listed infidelities, each in the
    /// worst-case state that passes with probability `1 − νε_j`.
    Iid { per_copy_infidelities: Vec<f64> },
    /// Permutation-invariant adversary given by a configuration mixture.
    Adversary { mixture: Vec<WeightedConfiguration> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: SimMode,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn iid(per_copy_infidelities: Vec<f64>, trials: u64, seed: u64) -> Self {
        SimConfig {
            n: per_copy_infidelities.len() as u64,
            mode: SimMode::Iid {
                per_copy_infidelities,
            },
            trials,
            seed,
        }
    }

    pub fn adversary(oracle: &OracleResult, n: u64, trials: u64, seed: u64) -> Self {
        SimConfig {
            mode: SimMode::Adversary {
                mixture: oracle.support.clone(),
            },
            n,
            trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: u64,
    pub acceptances: u64,
    pub empirical_rate: f64,
    pub predicted_rate: f64,
    /// Standardized deviation of the acceptance rate. Zero when the
    /// prediction is 0 or 1 and matched exactly, infinite when it is 0 or 1
    /// and missed.
    pub z_score: f64,
    /// Fraction of accepting trials whose untested copy was the target.
    pub conditional_fidelity_estimate: Option<f64>,
    pub predicted_conditional_fidelity: Option<f64>,
    /// Standardized deviation of the conditional fidelity estimate.
    pub conditional_z_score: Option<f64>,
}

fn z_score(successes: u64, trials: u64, predicted: f64) -> f64 {
    let empirical = successes as f64 / trials as f64;
    if predicted > 0.0 && predicted < 1.0 {
        (empirical - predicted) / (predicted * (1.0 - predicted) / trials as f64).sqrt()
    } else if empirical == predicted {
        0.0
    } else {
        f64::INFINITY
    }
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng.set_word_pos(0);
    rng
}

fn check_trials(config: &SimConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(QsvError::Domain {
            name: "trials",
            value: 0.0,
            domain: "trials ≥ 1",
        });
    }
    Ok(())
}

/// Simulates independent copies against `Π_j (1 − νε_j)`.
pub fn simulate_iid(summary: &StrategySummary, config: &SimConfig) -> Result<SimReport> {
    let SimMode::Iid {
        per_copy_infidelities: eps,
    } = &config.mode
    else {
        return Err(QsvError::ModeMismatch("iid simulation needs iid mode"));
    };
    check_trials(config)?;
    if eps.len() as u64 != config.n || eps.is_empty() {
        return Err(QsvError::DimensionMismatch {
            expected: config.n as usize,
            found: eps.len(),
        });
    }
    if let Some(&bad) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(QsvError::Domain {
            name: "per-copy infidelity",
            value: bad,
            domain: "[0, 1]",
        });
    }
    let pass: Vec<f64> = eps.iter().map(|e| 1.0 - summary.nu * e).collect();
    let predicted: f64 = pass.iter().product();

    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let acceptances: u64 = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(&base, t);
            u64::from(pass.iter().all(|&q| rng.random::<f64>() < q))
        })
        .sum();

    Ok(SimReport {
        trials: config.trials,
        acceptances,
        empirical_rate: acceptances as f64 / config.trials as f64,
        predicted_rate: predicted,
        z_score: z_score(acceptances, config.trials, predicted),
        conditional_fidelity_estimate: None,
        predicted_conditional_fidelity: None,
        conditional_z_score: None,
    })
}

fn validate_mixture(
    values: &[f64],
    n: u64,
    mixture: &[WeightedConfiguration],
) -> Result<()> {
    if mixture.is_empty() {
        return Err(QsvError::Parse("empty mixture".into()));
    }
    let total: f64 = mixture.iter().map(|w| w.weight).sum();
    if (total - 1.0).abs() > 1e-9 || mixture.iter().any(|w| w.weight < 0.0) {
        return Err(QsvError::ProbabilitySum(total));
    }
    for w in mixture {
        let counts = &w.configuration.counts;
        if counts.len() != values.len() {
            return Err(QsvError::DimensionMismatch {
                expected: values.len(),
                found: counts.len(),
            });
        }
        if counts.iter().sum::<u64>() != n + 1 {
            return Err(QsvError::Parse(format!(
                "configuration {counts:?} does not cover {} copies",
                n + 1
            )));
        }
    }
    Ok(())
}

/// Simulates a configuration mixture copy by copy: pick a configuration, a
/// uniformly random untested copy, and an independent pass/fail outcome for
/// every tested copy with probability equal to its eigenvalue.
pub fn simulate_adversary(spectrum: &EigenSpectrum, config: &SimConfig) -> Result<SimReport> {
    let SimMode::Adversary { mixture } = &config.mode else {
        return Err(QsvError::ModeMismatch("adversary simulation needs adversary mode"));
    };
    check_trials(config)?;
    let values = spectrum.values();
    let n = config.n;
    validate_mixture(&values, n, mixture)?;

    let mut cumulative = Vec::with_capacity(mixture.len());
    let mut acc = 0.0;
    for w in mixture {
        acc += w.weight;
        cumulative.push(acc);
    }
    let configs: Vec<&AdversaryConfiguration> = mixture.iter().map(|w| &w.configuration).collect();

    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let (acceptances, target_kept) = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(&base, t);
            let u: f64 = rng.random::<f64>() * acc;
            let pick = cumulative.iter().position(|&c| u < c).unwrap_or(configs.len() - 1);
            let counts = &configs[pick].counts;

            let mut untested = rng.random_range(0..n + 1);
            let mut untested_level = 0;
            for (level, &c) in counts.iter().enumerate() {
                if untested < c {
                    untested_level = level;
                    break;
                }
                untested -= c;
            }

            let mut passed = true;
            'copies: for (level, (&c, &v)) in counts.iter().zip(&values).enumerate() {
                let tested = if level == untested_level { c - 1 } else { c };
                for _ in 0..tested {
                    if rng.random::<f64>() >= v {
                        passed = false;
                        break 'copies;
                    }
                }
            }
            (u64::from(passed), u64::from(passed && untested_level == 0))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let predicted: f64 = mixture.iter().map(|w| w.weight * w.configuration.pass_prob).sum();
    let predicted_fid: f64 =
        mixture.iter().map(|w| w.weight * w.configuration.fid_prob).sum::<f64>() / predicted;
    let (estimate, cond_z) = if acceptances > 0 {
        (
            Some(target_kept as f64 / acceptances as f64),
            Some(z_score(target_kept, acceptances, predicted_fid)),
        )
    } else {
        (None, None)
    };

    Ok(SimReport {
        trials: config.trials,
        acceptances,
        empirical_rate: acceptances as f64 / config.trials as f64,
        predicted_rate: predicted,
        z_score: z_score(acceptances, config.trials, predicted),
        conditional_fidelity_estimate: estimate,
        predicted_conditional_fidelity: Some(predicted_fid),
        conditional_z_score: cond_z,
    })
}
