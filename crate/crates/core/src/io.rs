//! Text formats: the operator JSON file and the compact spectrum string.
//!
//! Operator file:
//!
//! ```json
//! { "dimension": 2,
//!   "target_state": [[1, 0], [0, 0]],
//!   "tests": [ { "probability": 1.0,
//!                "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]] } ] }
//! ```
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows.
//!
//! Spectrum string: `"1:1,0.5:3,0.1:2"`, i.e. `value:multiplicity` pairs in
//! descending order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::strategy::{
    build_verification_operator, spectrum_from_operator, EigenSpectrum, TargetState, TestSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dimension: usize,
    pub target_state: Vec<[f64; 2]>,
    pub tests: Vec<TestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub probability: f64,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

impl OperatorFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QsvError::Parse(e.to_string()))
    }

    /// Converts to validated tests and target.
    pub fn into_parts(self) -> Result<(Vec<TestSpec>, TargetState)> {
        let dim = self.dimension;
        if self.target_state.len() != dim {
            return Err(QsvError::DimensionMismatch {
                expected: dim,
                found: self.target_state.len(),
            });
        }
        let target = TargetState::new(self.target_state.iter().map(complex).collect())?;
        let tests = self
            .tests
            .into_iter()
            .map(|t| {
                if t.matrix.len() != dim {
                    return Err(QsvError::DimensionMismatch {
                        expected: dim,
                        found: t.matrix.len(),
                    });
                }
                if let Some(row) = t.matrix.iter().find(|r| r.len() != dim) {
                    return Err(QsvError::DimensionMismatch {
                        expected: dim,
                        found: row.len(),
                    });
                }
                Ok(TestSpec {
                    probability: t.probability,
                    matrix: DMatrix::from_fn(dim, dim, |i, j| complex(&t.matrix[i][j])),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((tests, target))
    }

    /// Builds the verification operator and extracts its spectrum.
    pub fn spectrum(self) -> Result<EigenSpectrum> {
        let (tests, target) = self.into_parts()?;
        let omega = build_verification_operator(&tests, &target)?;
        spectrum_from_operator(&omega, &target)
    }
}

pub fn parse_spectrum(text: &str) -> Result<EigenSpectrum> {
    let entries = text
        .split(',')
        .map(|item| {
            let (value, mult) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| QsvError::Parse(format!("expected value:multiplicity, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| QsvError::Parse(format!("bad eigenvalue {value:?}")))?;
            let mult: usize = mult
                .trim()
                .parse()
                .map_err(|_| QsvError::Parse(format!("bad multiplicity {mult:?}")))?;
            Ok((value, mult))
        })
        .collect::<Result<Vec<_>>>()?;
    EigenSpectrum::new(entries)
}

pub fn format_spectrum(spectrum: &EigenSpectrum) -> String {
    spectrum
        .entries()
        .iter()
        .map(|(v, m)| format!("{v}:{m}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spectrum_string() {
        let s = parse_spectrum("1:1,0.5:3,0.1:2").unwrap();
        assert_eq!(s.entries(), &[(1.0, 1), (0.5, 3), (0.1, 2)]);
        assert_eq!(s.dim(), 6);
        assert_eq!(format_spectrum(&s), "1:1,0.5:3,0.1:2");
        assert!(parse_spectrum("1:1,0.5").is_err());
        assert!(parse_spectrum("1:1,x:2").is_err());
        assert!(parse_spectrum("1:1,0.1:2,0.5:3").is_err());
    }

    #[test]
    fn operator_file() {
        let text = r#"{
            "dimension": 2,
            "target_state": [[1, 0], [0, 0]],
            "tests": [
                {"probability": 0.5, "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]},
                {"probability": 0.5, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]}
            ]
        }"#;
        let s = OperatorFile::from_json(text).unwrap().spectrum().unwrap();
        assert_eq!(s.entries(), &[(1.0, 1), (0.5, 1)]);

        let short = r#"{"dimension": 2, "target_state": [[1,0]], "tests": []}"#;
        assert!(matches!(
            OperatorFile::from_json(short).unwrap().into_parts(),
            Err(QsvError::DimensionMismatch { .. })
        ));
        assert!(matches!(OperatorFile::from_json("{"), Err(QsvError::Parse(_))));
    }

    proptest! {
        #[test]
        fn spectrum_string_round_trip(raw in proptest::collection::btree_set(0u32..1_000_000, 1..6), mults in proptest::collection::vec(1usize..5, 6)) {
            let mut values: Vec<f64> = raw.into_iter().map(|v| v as f64 / 1_000_000.0).collect();
            values.reverse();
            let mut entries = vec![(1.0, 1)];
            entries.extend(values.into_iter().zip(mults));
            let s = EigenSpectrum::new(entries).unwrap();
            prop_assert_eq!(parse_spectrum(&format_spectrum(&s)).unwrap(), s);
        }
    }
}
