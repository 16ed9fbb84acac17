//! Indexed series: exact or floating coefficients, and real-valued derived
//! sequences.

use std::f64::consts::LN_2;

use avoid1324::{ParseError, SeriesTable};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::AnalysisError;

/// A real sequence `s_n` for `n = start, start+1, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSeries {
    start: usize,
    values: Vec<f64>,
}

impl RealSeries {
    pub fn new(start: usize, values: Vec<f64>) -> Self {
        RealSeries { start, values }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Index of the last value; equals `start - 1` when empty.
    pub fn end(&self) -> usize {
        (self.start + self.values.len()).wrapping_sub(1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn last(&self) -> Option<(usize, f64)> {
        self.values.last().map(|&v| (self.end(), v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.start + i, v))
    }

    /// The terms with index at least `from`.
    pub fn from_index(&self, from: usize) -> RealSeries {
        let skip = from.saturating_sub(self.start).min(self.values.len());
        RealSeries::new(self.start + skip, self.values[skip..].to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Exact(Vec<BigInt>),
    Float(Vec<f64>),
}

/// Coefficients `b_n` for `n = start, start+1, ...`, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    start: usize,
    values: Values,
}

impl CoefficientSeries {
    pub fn exact(start: usize, values: Vec<BigInt>) -> Self {
        CoefficientSeries {
            start,
            values: Values::Exact(values),
        }
    }

    pub fn float(start: usize, values: Vec<f64>) -> Self {
        CoefficientSeries {
            start,
            values: Values::Float(values),
        }
    }

    pub fn from_table(table: &SeriesTable) -> Self {
        let values = table
            .coefficients
            .iter()
            .map(|c| BigInt::from_biguint(Sign::Plus, c.clone()))
            .collect();
        CoefficientSeries::exact(0, values)
    }

    pub fn from_real(series: &RealSeries) -> Self {
        CoefficientSeries::float(series.start(), series.values().to_vec())
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the last coefficient.
    pub fn end(&self) -> usize {
        (self.start + self.len()).wrapping_sub(1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    /// The terms with index at least `from`.
    pub fn from_index(&self, from: usize) -> CoefficientSeries {
        let skip = from.saturating_sub(self.start).min(self.len());
        let values = match &self.values {
            Values::Exact(v) => Values::Exact(v[skip..].to_vec()),
            Values::Float(v) => Values::Float(v[skip..].to_vec()),
        };
        CoefficientSeries {
            start: self.start + skip,
            values,
        }
    }

    /// Lossy floating view.
    pub fn to_real(&self) -> RealSeries {
        let values = match &self.values {
            Values::Exact(v) => v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            Values::Float(v) => v.clone(),
        };
        RealSeries::new(self.start, values)
    }

    /// Exact rational value of every coefficient; floats convert exactly.
    pub fn to_rationals(&self) -> Result<Vec<BigRational>, AnalysisError> {
        match &self.values {
            Values::Exact(v) => Ok(v
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()),
            Values::Float(v) => v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    BigRational::from_float(x).ok_or_else(|| AnalysisError::Domain {
                        index: self.start + i,
                        msg: "coefficient is not finite".into(),
                    })
                })
                .collect(),
        }
    }

    /// `ln b_n`, accurate for exact coefficients of any size.
    pub fn ln_values(&self) -> Result<RealSeries, AnalysisError> {
        let values = match &self.values {
            Values::Exact(v) => v
                .iter()
                .enumerate()
                .map(|(i, x)| ln_positive(x).ok_or_else(|| self.non_positive(i)))
                .collect::<Result<Vec<_>, _>>()?,
            Values::Float(v) => v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if x > 0.0 && x.is_finite() {
                        Ok(x.ln())
                    } else {
                        Err(self.non_positive(i))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(RealSeries::new(self.start, values))
    }

    /// `r_n = b_n / b_{n-1}`, correctly rounded for exact coefficients.
    pub fn ratios(&self) -> Result<RealSeries, AnalysisError> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        for i in 1..self.len() {
            let r = match &self.values {
                Values::Exact(v) => {
                    if v[i - 1].is_zero() {
                        return Err(AnalysisError::Domain {
                            index: self.start + i,
                            msg: "previous coefficient is zero".into(),
                        });
                    }
                    BigRational::new(v[i].clone(), v[i - 1].clone())
                        .to_f64()
                        .unwrap_or(f64::NAN)
                }
                Values::Float(v) => {
                    if v[i - 1] == 0.0 {
                        return Err(AnalysisError::Domain {
                            index: self.start + i,
                            msg: "previous coefficient is zero".into(),
                        });
                    }
                    v[i] / v[i - 1]
                }
            };
            out.push(r);
        }
        Ok(RealSeries::new(self.start + 1, out))
    }

    /// `b_n b_{n-2} / b_{n-1}^2 - 1`, computed without cancellation for exact input.
    pub fn second_ratio_deviation(&self) -> Result<RealSeries, AnalysisError> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(2));
        match &self.values {
            Values::Exact(v) => {
                for i in 2..self.len() {
                    let sq = &v[i - 1] * &v[i - 1];
                    if sq.is_zero() {
                        return Err(self.non_positive(i - 1));
                    }
                    let dev = BigRational::new(&v[i] * &v[i - 2] - &sq, sq);
                    out.push(dev.to_f64().unwrap_or(f64::NAN));
                }
            }
            Values::Float(_) => {
                let ln = self.ln_values()?;
                let l = ln.values();
                for i in 2..l.len() {
                    out.push((l[i] + l[i - 2] - 2.0 * l[i - 1]).exp_m1());
                }
            }
        }
        Ok(RealSeries::new(self.start + 2, out))
    }

    fn non_positive(&self, i: usize) -> AnalysisError {
        AnalysisError::Domain {
            index: self.start + i,
            msg: "coefficient must be positive".into(),
        }
    }
}

fn ln_positive(x: &BigInt) -> Option<f64> {
    if !x.is_positive() {
        return None;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64()?;
    Some(top.ln() + shift as f64 * LN_2)
}

/// Reads `n<TAB>value` or `n,value` lines. `#` lines and a non-numeric header
/// row are skipped. Integers give an exact series, anything else a floating one.
pub fn parse_series(text: &str) -> Result<CoefficientSeries, ParseError> {
    let mut start = None;
    let mut raw: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (n, value) = match line.split_once('\t').or_else(|| line.split_once(',')) {
            Some((n, v)) => (n.trim(), v.trim()),
            None => return Err(ParseError::new(lineno, "expected n and value")),
        };
        let n = match n.parse::<usize>() {
            Ok(n) => n,
            Err(_) if raw.is_empty() && start.is_none() => {
                // header row such as "n,value"
                start = Some(usize::MAX);
                continue;
            }
            Err(_) => return Err(ParseError::new(lineno, format!("bad index {n:?}"))),
        };
        let value = value.split(',').next().unwrap_or("").trim();
        match raw.last() {
            Some(&(prev, _)) if n != prev + 1 => {
                return Err(ParseError::new(
                    lineno,
                    format!("expected n = {}, found {n}", prev + 1),
                ))
            }
            _ => {}
        }
        raw.push((n, value));
        let _ = lineno;
    }
    let Some(&(first, _)) = raw.first() else {
        return Err(ParseError::new(text.lines().count().max(1), "no data rows"));
    };
    let exact: Option<Vec<BigInt>> = raw.iter().map(|(_, v)| v.parse::<BigInt>().ok()).collect();
    if let Some(values) = exact {
        return Ok(CoefficientSeries::exact(first, values));
    }
    let mut values = Vec::with_capacity(raw.len());
    for (k, (_, v)) in raw.iter().enumerate() {
        let x: f64 = v
            .parse()
            .map_err(|_| ParseError::new(data_line(text, k), format!("bad value {v:?}")))?;
        values.push(x);
    }
    Ok(CoefficientSeries::float(first, values))
}

// Line number of the k-th data row, for error messages.
fn data_line(text: &str, k: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty()
                && !l.starts_with('#')
                && l.split(['\t', ','])
                    .next()
                    .is_some_and(|n| n.trim().parse::<usize>().is_ok())
        })
        .nth(k)
        .map_or(0, |(i, _)| i + 1)
}
