//! Ratio-method estimators and sequence transforms.

use avoid1324::AsymptoticParams;

use crate::error::AnalysisError;
use crate::series::{CoefficientSeries, RealSeries};

/// `(n^t s_n - (n-1)^t s_{n-1}) / (n^t - (n-1)^t)`: the intercept of the line
/// through consecutive points plotted against `n^{-t}`.
pub fn pair_extrapolate(seq: &RealSeries, t: f64) -> Result<RealSeries, AnalysisError> {
    if !(t > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "exponent t = {t} must be positive"
        )));
    }
    if seq.start() == 0 {
        return pair_extrapolate(&seq.from_index(1), t);
    }
    let mut out = Vec::with_capacity(seq.len().saturating_sub(1));
    for (n, s) in seq.iter().skip(1) {
        let hi = (n as f64).powf(t);
        let lo = ((n - 1) as f64).powf(t);
        let prev = seq.get(n - 1).unwrap_or(f64::NAN);
        out.push((hi * s - lo * prev) / (hi - lo));
    }
    Ok(RealSeries::new(seq.start() + 1, out))
}

/// `(1-σ)_n` from ratios and a fixed growth constant `mu`.
pub fn sigma_local_given_mu(ratios: &RealSeries, mu: f64) -> Result<RealSeries, AnalysisError> {
    if !(mu > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "mu = {mu} must be positive"
        )));
    }
    let start = ratios.start().max(1);
    let mut out = Vec::new();
    for n in start + 1..=ratios.end() {
        let (Some(prev), Some(cur)) = (ratios.get(n - 1), ratios.get(n)) else {
            continue;
        };
        let (a, b) = (1.0 - prev / mu, 1.0 - cur / mu);
        if a <= 0.0 || b <= 0.0 {
            return Err(AnalysisError::Domain {
                index: n,
                msg: format!("ratio reaches or exceeds mu = {mu}"),
            });
        }
        out.push((a.ln() - b.ln()) / ((n as f64).ln() - ((n - 1) as f64).ln()));
    }
    Ok(RealSeries::new(start + 1, out))
}

/// `r_{σ,n} - 1` where `r_{σ,n} = b_n b_{n-2} / b_{n-1}^2`.
pub fn sigma_free(series: &CoefficientSeries) -> Result<RealSeries, AnalysisError> {
    series.second_ratio_deviation()
}

/// Local gradient of `log|s_n|` against `log n`; applied to the output of
/// [`sigma_free`] it estimates `σ - 2`.
pub fn loglog_gradient(deviation: &RealSeries) -> Result<RealSeries, AnalysisError> {
    for (n, v) in deviation.iter() {
        if v == 0.0 {
            return Err(AnalysisError::Domain {
                index: n,
                msg: "second ratio equals one exactly".into(),
            });
        }
    }
    let start = deviation.start().max(1);
    let mut out = Vec::new();
    for n in start + 1..=deviation.end() {
        let (Some(prev), Some(cur)) = (deviation.get(n - 1), deviation.get(n)) else {
            continue;
        };
        out.push((cur.abs().ln() - prev.abs().ln()) / ((n as f64).ln() - ((n - 1) as f64).ln()));
    }
    Ok(RealSeries::new(start + 1, out))
}

/// The renormalized series `d_n = exp(c_n)`, held in log form.
#[derive(Clone, Debug, PartialEq)]
pub struct Renormalized {
    /// `c_n = 2 n^{3/2} (ln b_n / √n - ln b_{n-1} / √(n-1))`.
    pub log_values: RealSeries,
}

impl Renormalized {
    pub fn values(&self) -> Result<RealSeries, AnalysisError> {
        let mut out = Vec::with_capacity(self.log_values.len());
        for (n, c) in self.log_values.iter() {
            let d = c.exp();
            if !d.is_finite() {
                return Err(AnalysisError::Overflow { index: n });
            }
            out.push(d);
        }
        Ok(RealSeries::new(self.log_values.start(), out))
    }

    /// `d_n / d_{n-1}`, formed from log differences so it never overflows.
    pub fn ratios(&self) -> RealSeries {
        let c = self.log_values.values();
        let values = c.windows(2).map(|w| (w[1] - w[0]).exp()).collect();
        RealSeries::new(self.log_values.start() + 1, values)
    }
}

pub fn renormalize(series: &CoefficientSeries) -> Result<Renormalized, AnalysisError> {
    let usable = series.from_index(1);
    let ln = usable.ln_values()?;
    if ln.len() < 2 {
        return Err(AnalysisError::TooShort {
            needed: 2,
            got: ln.len(),
        });
    }
    let scaled: Vec<f64> = ln.iter().map(|(n, l)| l / (n as f64).sqrt()).collect();
    let values = scaled
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let n = (ln.start() + i + 1) as f64;
            2.0 * n.powf(1.5) * (w[1] - w[0])
        })
        .collect();
    Ok(Renormalized {
        log_values: RealSeries::new(ln.start() + 1, values),
    })
}

/// `B_n = b_n / (μ^n μ₁^{n^σ} n^g)`, formed in log space.
pub fn amplitude_sequence(
    series: &CoefficientSeries,
    params: &AsymptoticParams,
) -> Result<RealSeries, AnalysisError> {
    if !(params.growth > 0.0 && params.stretch_base > 0.0) {
        return Err(AnalysisError::InvalidParameter(
            "growth and stretch base must be positive".into(),
        ));
    }
    let ln = series.from_index(1).ln_values()?;
    let mut out = Vec::with_capacity(ln.len());
    for (n, l) in ln.iter() {
        let x = n as f64;
        let log_b = l
            - x * params.growth.ln()
            - x.powf(params.stretch_power) * params.stretch_base.ln()
            - params.power * x.ln();
        let b = log_b.exp();
        if !b.is_finite() {
            return Err(AnalysisError::Overflow { index: n });
        }
        out.push(b);
    }
    Ok(RealSeries::new(ln.start(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn pair_extrapolation_is_exact_for_linear_model() {
        let seq = RealSeries::new(1, (1..20).map(|n| 4.0 + 3.0 / n as f64).collect());
        let ext = pair_extrapolate(&seq, 1.0).unwrap();
        assert_eq!(ext.start(), 2);
        assert!(ext.values().iter().all(|v| (v - 4.0).abs() < 1e-12));
        assert!(pair_extrapolate(&seq, 0.0).is_err());
    }

    #[test]
    fn geometric_second_ratio_is_degenerate() {
        let s = CoefficientSeries::exact(0, (0..8).map(|k| BigInt::from(3u32).pow(k)).collect());
        let dev = sigma_free(&s).unwrap();
        assert!(matches!(
            loglog_gradient(&dev),
            Err(AnalysisError::Domain { .. })
        ));
    }

    #[test]
    fn renormalized_geometric_ratios() {
        let s = CoefficientSeries::exact(0, (0..60).map(|k| BigInt::from(7u32).pow(k)).collect());
        let r = renormalize(&s).unwrap().ratios();
        let (_, last) = r.last().unwrap();
        assert!((last / 7.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn amplitude_of_pure_exponential() {
        let s = CoefficientSeries::exact(
            0,
            (0..10)
                .map(|k| BigInt::from(5u32) * BigInt::from(2u32).pow(k))
                .collect(),
        );
        let params = AsymptoticParams::new(1.0, 2.0, 1.0, 0.5, 0.0);
        let b = amplitude_sequence(&s, &params).unwrap();
        assert!(b.values().iter().all(|v| (v - 5.0).abs() < 1e-12));
    }
}
