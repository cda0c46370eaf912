use thiserror::Error;

pub type Result<T> = std::result::Result<T, QsvError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsvError {
    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("test probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("test {index} does not accept the target state (residual {residual:e})")]
    TargetRejected { index: usize, residual: f64 },

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("eigenvalue {0} lies outside [0, 1]")]
    EigenvalueOutOfRange(f64),

    #[error("eigenvalue 1 is degenerate: the strategy has no spectral gap")]
    DegenerateTop,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("smallest eigenvalue is zero: hedge with the trivial test first")]
    HedgeRequired,

    #[error("configuration guard exceeded: {0}")]
    Guard(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("simulation mode mismatch: {0}")]
    ModeMismatch(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

impl QsvError {
    /// Guard and feasibility failures, as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, QsvError::Guard(_) | QsvError::Infeasible(_))
    }
}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(QsvError::Domain {
            name,
            value,
            domain: "(0, 1)",
        })
    }
}

pub(crate) fn check_half_open(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(QsvError::Domain {
            name,
            value,
            domain: "(0, 1]",
        })
    }
}

pub(crate) fn check_unit_left(name: &'static str, value: f64) -> Result<()> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(QsvError::Domain {
            name,
            value,
            domain: "[0, 1)",
        })
    }
}
