//! Sample-complexity planning for pure-state verification.
//!
//! Given the spectrum of a verification operator, this crate computes the
//! number of tests needed to certify a target state within an infidelity
//! budget and significance level, both for independent sources and for an
//! adversarial source that may prepare arbitrarily correlated states. It also
//! implements the trivial-test hedging recipe, an exact restricted-family
//! adversary used as an independent oracle, and Monte Carlo validation.
//!
//! Module map:
//!
//! - [`strategy`]: spectra, summaries, operator ingestion, hedging transform
//! - [`nonadversarial`]: independent-source planning
//! - [`homogeneous`]: exact adversarial results for homogeneous strategies
//! - [`general`]: adversarial bounds for arbitrary strategies
//! - [`hedging`]: the trivial-test recipe and overhead ratios
//! - [`oracle`]: brute-force adversary over eigenbasis configurations
//! - [`montecarlo`]: reproducible stochastic validation
//! - [`sweep`]: CSV data for test-count and overhead curves

pub mod error;
pub mod general;
pub mod hedging;
pub mod homogeneous;
pub mod io;
pub mod montecarlo;
pub mod nonadversarial;
pub mod numeric;
pub mod oracle;
pub mod strategy;
pub mod sweep;

pub use error::{QsvError, Result};
pub use nonadversarial::Precision;
pub use strategy::{EigenSpectrum, StrategySummary};
