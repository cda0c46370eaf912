//! Verification strategies: eigenvalue spectra, their summaries, operator
//! ingestion and the trivial-test hedging transform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_left, QsvError, Result};

/// Tolerance on `Σ μ_l = 1`.
pub const PROBABILITY_TOL: f64 = 1e-9;
/// Tolerance on `‖E_l|Ψ⟩ − |Ψ⟩‖` and `‖Ω|Ψ⟩ − |Ψ⟩‖`.
pub const FIXED_POINT_TOL: f64 = 1e-8;
/// Tolerance on `max |A_ij − conj(A_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues within this distance outside `[0, 1]` are clamped.
pub const CLAMP_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (on the unit scale) share a group.
pub const GROUPING_TOL: f64 = 1e-9;
/// Largest operator accepted for dense diagonalization.
pub const MAX_DIM: usize = 4096;

/// Distinct eigenvalues of a verification operator with multiplicities,
/// sorted strictly descending. The first entry is the target eigenvalue 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct EigenSpectrum {
    entries: Vec<(f64, usize)>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    entries: Vec<(f64, usize)>,
    dim: usize,
}

impl TryFrom<SpectrumRepr> for EigenSpectrum {
    type Error = QsvError;

    fn try_from(repr: SpectrumRepr) -> Result<Self> {
        let spectrum = EigenSpectrum::new(repr.entries)?;
        if spectrum.dim != repr.dim {
            return Err(QsvError::DimensionMismatch {
                expected: repr.dim,
                found: spectrum.dim,
            });
        }
        Ok(spectrum)
    }
}

impl From<EigenSpectrum> for SpectrumRepr {
    fn from(s: EigenSpectrum) -> Self {
        SpectrumRepr {
            entries: s.entries,
            dim: s.dim,
        }
    }
}

impl EigenSpectrum {
    /// Validates `(value, multiplicity)` pairs.
    pub fn new(entries: Vec<(f64, usize)>) -> Result<Self> {
        let invalid = |msg: &str| Err(QsvError::InvalidSpectrum(msg.to_string()));
        match entries.first() {
            None => return invalid("empty spectrum"),
            Some(&(v, m)) if v != 1.0 || m != 1 => {
                if v == 1.0 {
                    return Err(QsvError::DegenerateTop);
                }
                return invalid("first entry must be (1, 1)");
            }
            _ => {}
        }
        if entries.len() < 2 {
            return invalid("dimension must be at least 2");
        }
        for pair in entries.windows(2) {
            if pair[1].0.partial_cmp(&pair[0].0) != Some(std::cmp::Ordering::Less) {
                if pair[1].0 == 1.0 {
                    return Err(QsvError::DegenerateTop);
                }
                return invalid("values must be strictly descending");
            }
        }
        for &(v, m) in &entries[1..] {
            if !(0.0..1.0).contains(&v) {
                return Err(QsvError::EigenvalueOutOfRange(v));
            }
            if m == 0 {
                return invalid("multiplicities must be positive");
            }
        }
        let dim = entries.iter().map(|&(_, m)| m).sum();
        Ok(EigenSpectrum { entries, dim })
    }

    /// Spectrum of a homogeneous strategy `|Ψ⟩⟨Ψ| + λ(1 − |Ψ⟩⟨Ψ|)` in
    /// dimension `dim`.
    pub fn homogeneous(lambda: f64, dim: usize) -> Result<Self> {
        check_unit_left("lambda", lambda)?;
        Self::new(vec![(1.0, 1), (lambda, dim.saturating_sub(1))])
    }

    /// Groups raw eigenvalues (any order) into a spectrum. The largest value
    /// must be 1 up to [`CLAMP_TOL`]; it is stored as exactly 1.
    pub fn from_eigenvalues(values: &[f64]) -> Result<Self> {
        let mut vals = Vec::with_capacity(values.len());
        for &v in values {
            if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
                return Err(QsvError::EigenvalueOutOfRange(v));
            }
            vals.push(v.clamp(0.0, 1.0));
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        let Some(&top) = vals.first() else {
            return Err(QsvError::InvalidSpectrum("empty spectrum".into()));
        };
        if 1.0 - top > CLAMP_TOL {
            return Err(QsvError::InvalidSpectrum(format!(
                "largest eigenvalue {top} is not 1"
            )));
        }
        if vals.len() > 1 && 1.0 - vals[1] <= GROUPING_TOL {
            return Err(QsvError::DegenerateTop);
        }

        let mut entries: Vec<(f64, usize)> = vec![(1.0, 1)];
        let mut group: Vec<f64> = Vec::new();
        let flush = |group: &mut Vec<f64>, entries: &mut Vec<(f64, usize)>| {
            if !group.is_empty() {
                let mean = group.iter().sum::<f64>() / group.len() as f64;
                entries.push((mean, group.len()));
                group.clear();
            }
        };
        for &v in &vals[1..] {
            if let Some(&head) = group.first() {
                if head - v > GROUPING_TOL * head.max(1.0) {
                    flush(&mut group, &mut entries);
                }
            }
            group.push(v);
        }
        flush(&mut group, &mut entries);
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenvalues, descending, starting with 1.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|&(v, _)| v).collect()
    }

    /// Spectrum of `p·1 + (1 − p)Ω`.
    pub fn hedged(&self, p: f64) -> Result<Self> {
        check_unit_left("p", p)?;
        let entries = std::iter::once((1.0, 1))
            .chain(
                self.entries[1..]
                    .iter()
                    .map(|&(v, m)| (p + (1.0 - p) * v, m)),
            )
            .collect();
        Self::new(entries)
    }
}

/// The spectral quantities the planners consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    /// Second largest eigenvalue.
    pub beta: f64,
    /// Spectral gap `1 − β`.
    pub nu: f64,
    /// Smallest eigenvalue.
    pub tau: f64,
    pub homogeneous: bool,
    pub lambda: Option<f64>,
}

impl StrategySummary {
    pub fn from_beta_tau(beta: f64, tau: f64) -> Result<Self> {
        check_unit_left("beta", beta)?;
        check_unit_left("tau", tau)?;
        if tau > beta {
            return Err(QsvError::Domain {
                name: "tau",
                value: tau,
                domain: "[0, beta]",
            });
        }
        let homogeneous = tau == beta;
        Ok(StrategySummary {
            beta,
            nu: 1.0 - beta,
            tau,
            homogeneous,
            lambda: homogeneous.then_some(beta),
        })
    }

    pub fn homogeneous(lambda: f64) -> Result<Self> {
        Self::from_beta_tau(lambda, lambda)
    }

    /// Summary with spectral gap `nu` and smallest eigenvalue `tau`.
    pub fn from_nu_tau(nu: f64, tau: f64) -> Result<Self> {
        crate::error::check_half_open("nu", nu)?;
        Self::from_beta_tau(1.0 - nu, tau)
    }

    pub fn is_singular(&self) -> bool {
        self.tau == 0.0
    }
}

pub fn summarize(spectrum: &EigenSpectrum) -> StrategySummary {
    let entries = spectrum.entries();
    let beta = entries[1].0;
    let tau = entries[entries.len() - 1].0;
    let homogeneous = entries.len() == 2;
    StrategySummary {
        beta,
        nu: 1.0 - beta,
        tau,
        homogeneous,
        lambda: homogeneous.then_some(beta),
    }
}

/// Summary of `Ω_p = p + (1 − p)Ω`.
pub fn hedge(summary: &StrategySummary, p: f64) -> Result<StrategySummary> {
    check_unit_left("p", p)?;
    let map = |v: f64| p + (1.0 - p) * v;
    let beta = map(summary.beta);
    Ok(StrategySummary {
        beta,
        nu: 1.0 - beta,
        tau: map(summary.tau),
        homogeneous: summary.homogeneous,
        lambda: summary.lambda.map(map),
    })
}

/// Normalized target state `|Ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    amplitudes: DVector<Complex64>,
}

impl TargetState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QsvError::Domain {
                name: "target norm",
                value: norm,
                domain: "1 ± 1e-10",
            });
        }
        Ok(TargetState { amplitudes: v })
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        TargetState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `|Ψ⟩⟨Ψ|`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// One test `{E_l, 1 − E_l}` performed with probability `μ_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec {
    pub probability: f64,
    pub matrix: DMatrix<Complex64>,
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn fixed_point_residual(m: &DMatrix<Complex64>, target: &TargetState) -> f64 {
    (m * target.amplitudes() - target.amplitudes()).norm()
}

fn check_square(m: &DMatrix<Complex64>, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(QsvError::DimensionMismatch {
            expected: dim,
            found: if m.nrows() != dim { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// `Ω = Σ_l μ_l E_l`, after validating every test.
pub fn build_verification_operator(
    tests: &[TestSpec],
    target: &TargetState,
) -> Result<DMatrix<Complex64>> {
    let dim = target.dim();
    if dim > MAX_DIM {
        return Err(QsvError::Guard(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if tests.is_empty() {
        return Err(QsvError::ProbabilitySum(0.0));
    }
    let total: f64 = tests.iter().map(|t| t.probability).sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(QsvError::ProbabilitySum(total));
    }

    let mut omega = DMatrix::<Complex64>::zeros(dim, dim);
    for (index, test) in tests.iter().enumerate() {
        if !(test.probability > 0.0 && test.probability <= 1.0) {
            return Err(QsvError::Domain {
                name: "probability",
                value: test.probability,
                domain: "(0, 1]",
            });
        }
        check_square(&test.matrix, dim)?;
        let defect = hermitian_defect(&test.matrix);
        if defect > HERMITIAN_TOL {
            return Err(QsvError::NotHermitian(defect));
        }
        for v in hermitian_eigenvalues(&test.matrix) {
            if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
                return Err(QsvError::EigenvalueOutOfRange(v));
            }
        }
        let residual = fixed_point_residual(&test.matrix, target);
        if residual > FIXED_POINT_TOL {
            return Err(QsvError::TargetRejected { index, residual });
        }
        omega += &test.matrix * Complex64::new(test.probability, 0.0);
    }
    Ok(omega)
}

/// Eigendecomposes `Ω` and groups its eigenvalues.
pub fn spectrum_from_operator(
    omega: &DMatrix<Complex64>,
    target: &TargetState,
) -> Result<EigenSpectrum> {
    let dim = target.dim();
    if dim > MAX_DIM {
        return Err(QsvError::Guard(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    check_square(omega, dim)?;
    let defect = hermitian_defect(omega);
    if defect > HERMITIAN_TOL {
        return Err(QsvError::NotHermitian(defect));
    }
    let residual = fixed_point_residual(omega, target);
    if residual > FIXED_POINT_TOL {
        return Err(QsvError::TargetRejected { index: 0, residual });
    }
    EigenSpectrum::from_eigenvalues(&hermitian_eigenvalues(omega))
}
