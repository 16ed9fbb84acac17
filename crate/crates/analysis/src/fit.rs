//! Windowed linear fits to asymptotic forms, solved exactly.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::AnalysisError;
use crate::ratio::pair_extrapolate;
use crate::series::{CoefficientSeries, RealSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct FitWindow {
    /// Largest index used by the window.
    pub top: usize,
    pub coefficients: Vec<f64>,
    /// Largest equation residual relative to the right-hand side scale.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub basis: Vec<&'static str>,
    pub windows: Vec<FitWindow>,
}

impl FitResult {
    /// Coefficient `index` as a sequence in the window's top index.
    pub fn coefficient(&self, index: usize) -> RealSeries {
        let start = self.windows.first().map_or(0, |w| w.top);
        RealSeries::new(
            start,
            self.windows.iter().map(|w| w.coefficients[index]).collect(),
        )
    }

    /// [`pair_extrapolate`] of coefficient `index` with exponent `t`.
    pub fn extrapolate(&self, index: usize, t: f64) -> Result<RealSeries, AnalysisError> {
        pair_extrapolate(&self.coefficient(index), t)
    }

    pub fn last(&self) -> Option<&FitWindow> {
        self.windows.last()
    }
}

type Basis = fn(f64) -> f64;

fn exact(x: f64, index: usize) -> Result<BigRational, AnalysisError> {
    BigRational::from_float(x).ok_or_else(|| AnalysisError::Domain {
        index,
        msg: "value is not finite".into(),
    })
}

/// Fits `rhs_j = Σ c_i basis_i(j)` over every run of `basis.len()` consecutive
/// indices of `rhs`.
fn windowed(
    rhs: &RealSeries,
    names: &[&'static str],
    basis: &[Basis],
) -> Result<FitResult, AnalysisError> {
    let size = basis.len();
    if rhs.len() < size {
        return Err(AnalysisError::TooShort {
            needed: size,
            got: rhs.len(),
        });
    }
    let mut windows = Vec::new();
    for first in rhs.start()..=rhs.end() + 1 - size {
        let top = first + size - 1;
        let indices: Vec<usize> = (first..=top).collect();
        let mut matrix = Vec::with_capacity(size);
        let mut target = Vec::with_capacity(size);
        for &j in &indices {
            let row = basis
                .iter()
                .map(|f| exact(f(j as f64), j))
                .collect::<Result<Vec<_>, _>>()?;
            matrix.push(row);
            target.push(exact(rhs.get(j).unwrap_or(f64::NAN), j)?);
        }
        let solution = crate::linalg::solve_exact(matrix, target)
            .ok_or(AnalysisError::SingularWindow { top })?;
        let coefficients: Vec<f64> = solution
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        let mut residual: f64 = 0.0;
        for &j in &indices {
            let y = rhs.get(j).unwrap_or(f64::NAN);
            let model: f64 = basis
                .iter()
                .zip(&coefficients)
                .map(|(f, c)| c * f(j as f64))
                .sum();
            let scale = basis
                .iter()
                .zip(&coefficients)
                .map(|(f, c)| (c * f(j as f64)).abs())
                .fold(y.abs(), f64::max)
                .max(f64::MIN_POSITIVE);
            residual = residual.max((model - y).abs() / scale);
        }
        windows.push(FitWindow {
            top,
            coefficients,
            residual,
        });
    }
    Ok(FitResult {
        basis: names.to_vec(),
        windows,
    })
}

/// `r_j / μ = 1 + c₁ j^{-1/2} + c₂ j^{-1} + c₃ j^{-3/2}` on `j ∈ {k-1, k, k+1}`.
pub fn fit_ratio_triple(ratios: &RealSeries, mu: f64) -> Result<FitResult, AnalysisError> {
    if !(mu > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "mu = {mu} must be positive"
        )));
    }
    let usable = ratios.from_index(1);
    let rhs = RealSeries::new(
        usable.start(),
        usable.values().iter().map(|r| r / mu - 1.0).collect(),
    );
    windowed(
        &rhs,
        &["c1", "c2", "c3"],
        &[|j| j.powf(-0.5), |j| 1.0 / j, |j| j.powf(-1.5)],
    )
}

/// `ln b_k = c₁ k + c₂ √k + c₃ ln k + c₄` on four consecutive indices.
pub fn fit_log_quad(series: &CoefficientSeries) -> Result<FitResult, AnalysisError> {
    let ln = series.from_index(1).ln_values()?;
    windowed(
        &ln,
        &["c1", "c2", "c3", "c4"],
        &[|k| k, f64::sqrt, f64::ln, |_| 1.0],
    )
}

/// `ln b_n - n ln μ = c₁ √n + c₂ ln n + c₃` on three consecutive indices.
pub fn fit_log_triple_mu(series: &CoefficientSeries, mu: f64) -> Result<FitResult, AnalysisError> {
    if !(mu > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "mu = {mu} must be positive"
        )));
    }
    let ln = series.from_index(1).ln_values()?;
    let rhs = RealSeries::new(
        ln.start(),
        ln.iter().map(|(n, l)| l - n as f64 * mu.ln()).collect(),
    );
    windowed(&rhs, &["c1", "c2", "c3"], &[f64::sqrt, f64::ln, |_| 1.0])
}
