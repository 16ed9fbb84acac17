//! Rational extrapolation tableau for sequences with corrections in `n^{-w}`.

use crate::error::AnalysisError;
use crate::series::RealSeries;

/// Rows `L = 0..=max_level`; row `L` holds `T(L, n)` for
/// `n = start .. end - L`. Cells hit by a zero denominator are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct BsTableau {
    pub w: f64,
    pub start: usize,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl BsTableau {
    pub fn get(&self, level: usize, n: usize) -> Option<f64> {
        let i = n.checked_sub(self.start)?;
        self.rows.get(level)?.get(i).copied().flatten()
    }

    /// The entry with the largest index in row `level`, as `(n, T(level, n))`.
    pub fn last(&self, level: usize) -> Option<(usize, Option<f64>)> {
        let row = self.rows.get(level)?;
        let i = row.len().checked_sub(1)?;
        Some((self.start + i, row[i]))
    }
}

pub fn bs_tableau(seq: &RealSeries, w: f64, max_level: usize) -> Result<BsTableau, AnalysisError> {
    if !(w > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "w = {w} must be positive"
        )));
    }
    if seq.start() == 0 {
        return Err(AnalysisError::InvalidParameter(
            "indices must start at 1 or later".into(),
        ));
    }
    let x: Vec<f64> = seq.iter().map(|(n, _)| (n as f64).powf(-w)).collect();
    Ok(BsTableau {
        w,
        start: seq.start(),
        rows: rational_tableau(seq.values(), &x, max_level)?,
    })
}

/// The tableau rows for values `s_i` sampled at abscissae `x_i`.
pub fn rational_tableau(
    values: &[f64],
    x: &[f64],
    max_level: usize,
) -> Result<Vec<Vec<Option<f64>>>, AnalysisError> {
    if values.len() != x.len() {
        return Err(AnalysisError::InvalidParameter(
            "values and abscissae differ in length".into(),
        ));
    }
    if values.len() < max_level + 1 {
        return Err(AnalysisError::TooShort {
            needed: max_level + 1,
            got: values.len(),
        });
    }
    let mut before: Vec<Option<f64>> = vec![Some(0.0); values.len()];
    let mut rows: Vec<Vec<Option<f64>>> = vec![values.iter().map(|&v| Some(v)).collect()];
    for level in 1..=max_level {
        let prev = &rows[level - 1];
        let row: Vec<Option<f64>> = (0..prev.len() - 1)
            .map(|i| {
                let (lo, hi, older) = (prev[i]?, prev[i + 1]?, before[i + 1]?);
                let step = hi - lo;
                let gap = hi - older;
                if gap == 0.0 {
                    return None;
                }
                let den = x[i] / x[i + level] * (1.0 - step / gap) - 1.0;
                if den == 0.0 {
                    return None;
                }
                Some(hi + step / den).filter(|v| v.is_finite())
            })
            .collect();
        before = prev.clone();
        rows.push(row);
    }
    Ok(rows)
}
