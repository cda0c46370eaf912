//! Parameter sweeps behind the test-count and overhead curves, as CSV.
//!
//! CSV output has a header row, LF line endings, unquoted integers, reals
//! with 17 significant digits, and an empty field for absent values. Rows
//! follow grid order: outer parameter, then ε, then δ.

use std::f64::consts::E;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::hedging::{nu_h, overhead_ratio_bound};
use crate::homogeneous::tests_homogeneous;
use crate::nonadversarial::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Figure {
    /// Exact adversarial counts of homogeneous strategies versus `λ`.
    NumTests,
    /// Overhead bound of the hedged strategy versus `ν`.
    Overhead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub figure: Figure,
    /// `λ` values for [`Figure::NumTests`], `ν` values for
    /// [`Figure::Overhead`].
    pub params: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Pair `epsilons[i]` with `deltas[i]` instead of taking all
    /// combinations.
    pub paired: bool,
}

impl SweepGrid {
    /// `λ ∈ {0.1, …, 0.9} ∪ {1/e}` at `ε ∈ {10⁻², 10⁻³}`,
    /// `δ ∈ {10⁻¹, 10⁻², 10⁻³}`.
    pub fn default_num_tests() -> Self {
        let mut params: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        params.push(1.0 / E);
        params.sort_by(f64::total_cmp);
        SweepGrid {
            figure: Figure::NumTests,
            params,
            epsilons: vec![1e-2, 1e-3],
            deltas: vec![1e-1, 1e-2, 1e-3],
            paired: false,
        }
    }

    /// `ν ∈ {0.1, 0.25, 0.5, 0.75, 1}` along `ε = δ` from `10⁻¹` to `10⁻⁸`.
    pub fn default_overhead() -> Self {
        let axis: Vec<f64> = (2..=16).map(|i| 10f64.powf(-(i as f64) / 2.0)).collect();
        SweepGrid {
            figure: Figure::Overhead,
            params: vec![0.1, 0.25, 0.5, 0.75, 1.0],
            epsilons: axis.clone(),
            deltas: axis,
            paired: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QsvError::Parse(msg));
        if self.params.is_empty() || self.epsilons.is_empty() || self.deltas.is_empty() {
            return bad("sweep grid lists must be nonempty".into());
        }
        if self.paired && self.epsilons.len() != self.deltas.len() {
            return bad("paired grid needs equally long epsilon and delta lists".into());
        }
        let param_ok = |v: f64| match self.figure {
            Figure::NumTests => v > 0.0 && v < 1.0,
            Figure::Overhead => v > 0.0 && v <= 1.0,
        };
        if let Some(v) = self.params.iter().find(|&&v| !param_ok(v)) {
            return bad(format!("grid parameter {v} out of range"));
        }
        for &v in self.epsilons.iter().chain(&self.deltas) {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("grid value {v} outside (0, 1)"));
            }
        }
        Ok(())
    }

    fn points(&self) -> Vec<(f64, Precision)> {
        let pairs: Vec<(f64, f64)> = if self.paired {
            self.epsilons.iter().copied().zip(self.deltas.iter().copied()).collect()
        } else {
            self.epsilons
                .iter()
                .flat_map(|&e| self.deltas.iter().map(move |&d| (e, d)))
                .collect()
        };
        self.params
            .iter()
            .flat_map(|&x| pairs.iter().map(move |&(e, d)| (x, Precision { epsilon: e, delta: d })))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumTestsRow {
    pub lambda: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub n_exact: u64,
    pub n_lower: u64,
    pub n_upper: u64,
    pub n_approx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub nu: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
    pub ratio_bound: f64,
    pub nu_h: f64,
}

fn expect_figure(grid: &SweepGrid, figure: Figure) -> Result<()> {
    if grid.figure != figure {
        return Err(QsvError::Parse(format!(
            "grid is for {:?}, expected {figure:?}",
            grid.figure
        )));
    }
    grid.validate()
}

pub fn sweep_num_tests(grid: &SweepGrid) -> Result<Vec<NumTestsRow>> {
    expect_figure(grid, Figure::NumTests)?;
    grid.points()
        .into_par_iter()
        .map(|(lambda, p)| {
            let plan = tests_homogeneous(p, lambda)?;
            Ok(NumTestsRow {
                lambda,
                epsilon: p.epsilon,
                delta: p.delta,
                n_exact: plan.n_exact,
                n_lower: plan.n_lower.unwrap_or(plan.n_exact),
                n_upper: plan.n_upper.unwrap_or(plan.n_exact),
                n_approx: plan.n_approx.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

pub fn sweep_overhead(grid: &SweepGrid) -> Result<Vec<OverheadRow>> {
    expect_figure(grid, Figure::Overhead)?;
    grid.points()
        .into_par_iter()
        .map(|(nu, prec)| {
            let p = nu / E;
            Ok(OverheadRow {
                nu,
                epsilon: prec.epsilon,
                delta: prec.delta,
                p,
                ratio_bound: overhead_ratio_bound(prec, nu, 0.0, p)?,
                nu_h: nu_h(nu)?,
            })
        })
        .collect()
}

fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn num_tests_csv(rows: &[NumTestsRow]) -> String {
    let mut out = String::from("lambda,epsilon,delta,n_exact,n_lower,n_upper,n_approx\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            real(r.lambda),
            real(r.epsilon),
            real(r.delta),
            r.n_exact,
            r.n_lower,
            r.n_upper,
            real(r.n_approx)
        );
    }
    out
}

pub fn overhead_csv(rows: &[OverheadRow]) -> String {
    let mut out = String::from("nu,epsilon,delta,p,ratio_bound,nu_h\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            real(r.nu),
            real(r.epsilon),
            real(r.delta),
            real(r.p),
            real(r.ratio_bound),
            real(r.nu_h)
        );
    }
    out
}

/// Runs the sweep matching `grid.figure` and renders it.
pub fn sweep_csv(grid: &SweepGrid) -> Result<String> {
    match grid.figure {
        Figure::NumTests => sweep_num_tests(grid).map(|r| num_tests_csv(&r)),
        Figure::Overhead => sweep_overhead(grid).map(|r| overhead_csv(&r)),
    }
}
