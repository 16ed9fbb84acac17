//! Differential approximants: `Σ_{i=0}^K Q_i(x) F^{(i)}(x) = P(x)` fitted to
//! series coefficients in exact arithmetic.

use std::thread;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::AnalysisError;
use crate::linalg::nullspace;

/// Exponents beyond this magnitude mark an approximant as defective.
pub const EXPONENT_CUTOFF: f64 = 25.0;
/// Roots further than this (relative) from the cell median are discarded,
/// and a pooled spread above it trips the canary.
pub const ROOT_SPREAD_TOLERANCE: f64 = 1e-2;
/// Median exponent magnitude above which the canary fires.
pub const CANARY_EXPONENT: f64 = 10.0;

const REAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DAModel {
    /// `Q_0 .. Q_K`, lowest degree first.
    pub q: Vec<Vec<BigRational>>,
    /// `None` for the homogeneous equation.
    pub p: Option<Vec<BigRational>>,
    pub coefficients_used: usize,
}

impl DAModel {
    pub fn order(&self) -> usize {
        self.q.len() - 1
    }

    pub fn leading(&self) -> &[BigRational] {
        &self.q[self.order()]
    }

    /// Checks the coefficient-matching equations in exact arithmetic.
    pub fn residual_is_zero(&self, coeffs: &[BigRational]) -> bool {
        let used = &coeffs[..self.coefficients_used.min(coeffs.len())];
        let equations = used.len().saturating_sub(self.order());
        (0..equations).all(|m| {
            let mut acc = BigRational::zero();
            for (i, poly) in self.q.iter().enumerate() {
                for (j, c) in poly.iter().enumerate() {
                    if j <= m && !c.is_zero() {
                        acc += c * derivative_coefficient(used, i, m - j);
                    }
                }
            }
            if let Some(p) = &self.p {
                if let Some(pm) = p.get(m) {
                    acc -= pm;
                }
            }
            acc.is_zero()
        })
    }
}

/// Coefficient of `x^m` in the `i`-th derivative of `Σ f_k x^k`.
fn derivative_coefficient<T>(f: &[T], i: usize, m: usize) -> T
where
    T: Clone + for<'a> std::ops::Mul<&'a T, Output = T> + From<BigInt>,
{
    let falling: BigInt = (m + 1..=m + i).map(BigInt::from).product();
    T::from(falling) * &f[m + i]
}

/// Degrees `d_0..d_K` splitting the unknowns evenly, with any remainder given
/// to the highest orders, so that the system is square after normalization.
pub fn balanced_degrees(
    ncoef: usize,
    order: usize,
    inhomogeneous: Option<usize>,
) -> Option<Vec<usize>> {
    let equations = ncoef.checked_sub(order)?;
    let unknowns = equations + 1;
    let q_unknowns = unknowns.checked_sub(inhomogeneous.map_or(0, |l| l + 1))?;
    let parts = order + 1;
    if q_unknowns < parts {
        return None;
    }
    let (base, rem) = q_unknowns.div_rem(&parts);
    let mut degrees = vec![base - 1; parts];
    for d in degrees.iter_mut().rev().take(rem) {
        *d += 1;
    }
    Some(degrees)
}

pub fn fit_da(
    coeffs: &[BigRational],
    order: usize,
    degrees: &[usize],
    inhomogeneous: Option<usize>,
) -> Result<DAModel, AnalysisError> {
    if order == 0 || degrees.len() != order + 1 {
        return Err(AnalysisError::InvalidParameter(format!(
            "order {order} needs {} degrees, got {}",
            order + 1,
            degrees.len()
        )));
    }
    let q_unknowns: usize = degrees.iter().map(|d| d + 1).sum();
    let p_unknowns = inhomogeneous.map_or(0, |l| l + 1);
    let unknowns = q_unknowns + p_unknowns;
    let equations = coeffs.len().saturating_sub(order);
    if unknowns - 1 > equations {
        return Err(AnalysisError::InsufficientCoefficients {
            needed: unknowns - 1 + order,
            got: coeffs.len(),
        });
    }
    let scale = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&scale / c.denom()))
        .collect();

    let mut matrix = Vec::with_capacity(equations);
    for m in 0..equations {
        let mut row = Vec::with_capacity(unknowns);
        for (i, &d) in degrees.iter().enumerate() {
            for j in 0..=d {
                row.push(if j <= m {
                    derivative_coefficient(&scaled, i, m - j)
                } else {
                    BigInt::zero()
                });
            }
        }
        for j in 0..p_unknowns {
            row.push(if j == m {
                -BigInt::one()
            } else {
                BigInt::zero()
            });
        }
        matrix.push(row);
    }
    let space = nullspace(matrix, unknowns);
    let Some(generator) = space.generator else {
        return Err(AnalysisError::DegenerateSystem {
            nullity: space.nullity(),
        });
    };

    let lead_offset = q_unknowns - (degrees[order] + 1);
    let norm = generator[lead_offset..q_unknowns]
        .iter()
        .find(|v| !v.is_zero())
        .cloned()
        .ok_or(AnalysisError::DegenerateSystem { nullity: 1 })?;
    let mut values = generator
        .into_iter()
        .map(|v| BigRational::new(v, norm.clone()));
    let q = degrees
        .iter()
        .map(|&d| values.by_ref().take(d + 1).collect())
        .collect();
    let p = inhomogeneous.map(|_| {
        let scale = BigRational::from_integer(scale);
        values.map(|v| v / &scale).collect()
    });
    Ok(DAModel {
        q,
        p,
        coefficients_used: coeffs.len(),
    })
}

/// [`fit_da`], lowering every positive degree by one while the solution space
/// has more than one dimension. Exact series of low-order equations need this.
pub fn fit_da_reducing(
    coeffs: &[BigRational],
    order: usize,
    degrees: &[usize],
    inhomogeneous: Option<usize>,
) -> Result<DAModel, AnalysisError> {
    let mut degrees = degrees.to_vec();
    loop {
        match fit_da(coeffs, order, &degrees, inhomogeneous) {
            Err(AnalysisError::DegenerateSystem { nullity })
                if nullity > 1 && degrees.iter().any(|&d| d > 0) =>
            {
                for d in degrees.iter_mut() {
                    *d = d.saturating_sub(1);
                }
            }
            other => return other,
        }
    }
}

fn float_poly(poly: &[BigRational]) -> Vec<f64> {
    let mut out: Vec<f64> = poly
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect();
    while out.last() == Some(&0.0) {
        out.pop();
    }
    out
}

fn horner(poly: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut slope = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        slope = slope * z + value;
        value = value * z + c;
    }
    (value, slope)
}

/// All complex roots of `Σ poly[j] x^j`, from the companion matrix and
/// refined by Newton steps.
pub fn polynomial_roots(poly: &[f64]) -> Vec<Complex64> {
    let mut poly = poly.to_vec();
    while poly.last() == Some(&0.0) {
        poly.pop();
    }
    let zeros = poly.iter().take_while(|&&c| c == 0.0).count();
    let trimmed = &poly[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let degree = trimmed.len().saturating_sub(1);
    if degree == 0 {
        return roots;
    }
    let lead = trimmed[degree];
    let companion = DMatrix::from_fn(degree, degree, |r, c| {
        if c == degree - 1 {
            -trimmed[r] / lead
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    for mut z in companion.complex_eigenvalues().iter().copied() {
        let mut best = horner(trimmed, z).0.norm();
        for _ in 0..60 {
            let (value, slope) = horner(trimmed, z);
            if slope.norm() == 0.0 {
                break;
            }
            let next = z - value / slope;
            let residual = horner(trimmed, next).0.norm();
            if !(residual < best) {
                break;
            }
            best = residual;
            z = next;
        }
        if z.im.abs() <= REAL_TOLERANCE * z.norm() {
            z.im = 0.0;
        }
        roots.push(z);
    }
    roots
}

#[derive(Clone, Debug, PartialEq)]
pub struct Singularity {
    pub location: Complex64,
    /// `K - 1 - Q_{K-1}(x_c) / Q_K'(x_c)`.
    pub exponent: Complex64,
    /// Smallest positive real root of `Q_K`.
    pub physical: bool,
}

pub fn singularities(model: &DAModel) -> Vec<Singularity> {
    let leading = float_poly(model.leading());
    let below = float_poly(&model.q[model.order() - 1]);
    let roots = polynomial_roots(&leading);
    let physical = roots
        .iter()
        .filter(|z| z.im == 0.0 && z.re > 0.0)
        .map(|z| z.re)
        .fold(None, |best: Option<f64>, x| {
            Some(best.map_or(x, |b| b.min(x)))
        });
    roots
        .into_iter()
        .map(|z| {
            let slope = horner(&leading, z).1;
            let exponent = (model.order() as f64 - 1.0) - horner(&below, z).0 / slope;
            Singularity {
                location: z,
                exponent,
                physical: physical == Some(z.re) && z.im == 0.0,
            }
        })
        .collect()
}

pub fn physical_root(model: &DAModel) -> Result<f64, AnalysisError> {
    singularities(model)
        .into_iter()
        .find(|s| s.physical)
        .map(|s| s.location.re)
        .ok_or(AnalysisError::NoPhysicalRoot)
}

pub fn exponent_at(model: &DAModel, x_c: f64) -> Result<f64, AnalysisError> {
    let leading = float_poly(model.leading());
    let below = float_poly(&model.q[model.order() - 1]);
    let z = Complex64::new(x_c, 0.0);
    let slope = horner(&leading, z).1.re;
    let size: f64 = leading
        .iter()
        .enumerate()
        .map(|(j, c)| (j as f64 * c * x_c.powi(j as i32 - 1)).abs())
        .sum();
    if !(slope.abs() > 1e-10 * size) {
        return Err(AnalysisError::MultipleRoot(x_c));
    }
    Ok(model.order() as f64 - 1.0 - horner(&below, z).0.re / slope)
}

/// Which approximants a scan cell tries: coefficient counts from
/// `len - span + 1` to `len`, each with the balanced degrees shifted by every
/// offset (an offset `o` adds `o` to `d_K` and removes it from `d_0`).
#[derive(Clone, Debug, PartialEq)]
pub struct DegreePolicy {
    pub span: usize,
    pub offsets: Vec<i32>,
}

impl Default for DegreePolicy {
    fn default() -> Self {
        DegreePolicy {
            span: 9,
            offsets: vec![-1, 0, 1],
        }
    }
}

impl DegreePolicy {
    pub fn degrees(
        &self,
        total: usize,
        order: usize,
        inhomogeneous: Option<usize>,
    ) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for ncoef in total.saturating_sub(self.span.saturating_sub(1)).max(1)..=total {
            let Some(base) = balanced_degrees(ncoef, order, inhomogeneous) else {
                continue;
            };
            for &offset in &self.offsets {
                let shift = offset.unsigned_abs() as usize;
                let (grow, shrink) = if offset >= 0 { (order, 0) } else { (0, order) };
                if base[shrink] < shift {
                    continue;
                }
                let mut degrees = base.clone();
                degrees[grow] += shift;
                degrees[shrink] -= shift;
                out.push((ncoef, degrees));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Approximant {
    pub coefficients_used: usize,
    pub degrees: Vec<usize>,
    pub inhomogeneous: Option<usize>,
    pub root: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCell {
    pub inhomogeneous: Option<usize>,
    pub attempted: usize,
    /// Approximants with a physical root, before filtering.
    pub found: Vec<Approximant>,
    /// Approximants surviving the exponent cutoff and the outlier filter.
    pub accepted: Vec<Approximant>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub spread: f64,
}

fn summarize(values: impl Iterator<Item = f64>) -> Option<Summary> {
    let values: Vec<f64> = values.collect();
    if values.is_empty() {
        return None;
    }
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let spread = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count).sqrt();
    Some(Summary { mean, spread })
}

fn median_low(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values[(values.len() - 1) / 2])
}

impl ScanCell {
    pub fn root(&self) -> Option<Summary> {
        summarize(self.accepted.iter().map(|a| a.root))
    }

    pub fn exponent(&self) -> Option<Summary> {
        summarize(self.accepted.iter().map(|a| a.exponent))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Canary {
    /// Median absolute deviation of the roots relative to their median.
    pub root_spread: f64,
    pub median_abs_exponent: f64,
    pub fires: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub order: usize,
    pub cells: Vec<ScanCell>,
    pub canary: Canary,
}

impl ScanReport {
    /// Mean root and exponent over all accepted approximants.
    pub fn overall(&self) -> Option<(Summary, Summary)> {
        let all = || self.cells.iter().flat_map(|c| c.accepted.iter());
        Some((
            summarize(all().map(|a| a.root))?,
            summarize(all().map(|a| a.exponent))?,
        ))
    }

    /// Mean over cells of the per-cell means, as in a table of cell averages.
    pub fn mean_of_cells(&self) -> Option<(f64, f64)> {
        let roots: Vec<f64> = self
            .cells
            .iter()
            .filter_map(|c| c.root())
            .map(|s| s.mean)
            .collect();
        let exps: Vec<f64> = self
            .cells
            .iter()
            .filter_map(|c| c.exponent())
            .map(|s| s.mean)
            .collect();
        if roots.is_empty() {
            return None;
        }
        Some((
            roots.iter().sum::<f64>() / roots.len() as f64,
            exps.iter().sum::<f64>() / exps.len() as f64,
        ))
    }
}

fn scan_cell(
    coeffs: &[BigRational],
    order: usize,
    inhomogeneous: Option<usize>,
    policy: &DegreePolicy,
) -> ScanCell {
    let plans = policy.degrees(coeffs.len(), order, inhomogeneous);
    let mut found = Vec::new();
    for (ncoef, degrees) in &plans {
        let Ok(model) = fit_da_reducing(&coeffs[..*ncoef], order, degrees, inhomogeneous) else {
            continue;
        };
        let Ok(root) = physical_root(&model) else {
            continue;
        };
        let Ok(exponent) = exponent_at(&model, root) else {
            continue;
        };
        found.push(Approximant {
            coefficients_used: *ncoef,
            degrees: degrees.clone(),
            inhomogeneous,
            root,
            exponent,
        });
    }
    let sane: Vec<&Approximant> = found
        .iter()
        .filter(|a| a.exponent.is_finite() && a.exponent.abs() <= EXPONENT_CUTOFF)
        .collect();
    let mut roots: Vec<f64> = sane.iter().map(|a| a.root).collect();
    let accepted = match median_low(&mut roots) {
        Some(centre) => sane
            .into_iter()
            .filter(|a| ((a.root - centre) / centre).abs() <= ROOT_SPREAD_TOLERANCE)
            .cloned()
            .collect(),
        None => Vec::new(),
    };
    ScanCell {
        inhomogeneous,
        attempted: plans.len(),
        found,
        accepted,
    }
}

fn canary(cells: &[ScanCell]) -> Canary {
    let found: Vec<&Approximant> = cells
        .iter()
        .flat_map(|c| c.found.iter())
        .filter(|a| a.exponent.abs() <= EXPONENT_CUTOFF)
        .collect();
    let mut roots: Vec<f64> = found.iter().map(|a| a.root).collect();
    let mut exps: Vec<f64> = found.iter().map(|a| a.exponent.abs()).collect();
    let (Some(centre), Some(median_abs_exponent)) = (median_low(&mut roots), median_low(&mut exps))
    else {
        return Canary {
            root_spread: f64::INFINITY,
            median_abs_exponent: f64::INFINITY,
            fires: true,
        };
    };
    let mut deviations: Vec<f64> = roots.iter().map(|r| (r - centre).abs()).collect();
    let root_spread = median_low(&mut deviations).unwrap_or(0.0) / centre.abs();
    let fires =
        !(root_spread <= ROOT_SPREAD_TOLERANCE) || !(median_abs_exponent <= CANARY_EXPONENT);
    Canary {
        root_spread,
        median_abs_exponent,
        fires,
    }
}

/// Fits the approximant family of `policy` for every entry of `inhomogeneous`
/// and summarizes each cell. Cells run on separate threads; the result does
/// not depend on scheduling.
pub fn scan(
    coeffs: &[BigRational],
    order: usize,
    inhomogeneous: &[Option<usize>],
    policy: &DegreePolicy,
) -> Result<ScanReport, AnalysisError> {
    if order == 0 {
        return Err(AnalysisError::InvalidParameter(
            "order must be at least 1".into(),
        ));
    }
    let cells: Vec<ScanCell> = thread::scope(|scope| {
        let handles: Vec<_> = inhomogeneous
            .iter()
            .map(|&l| scope.spawn(move || scan_cell(coeffs, order, l, policy)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan cell panicked"))
            .collect()
    });
    let canary = canary(&cells);
    Ok(ScanReport {
        order,
        cells,
        canary,
    })
}

/// Exact rationals from integers.
pub fn rationals_from_integers<I: Into<BigInt>>(
    values: impl IntoIterator<Item = I>,
) -> Vec<BigRational> {
    values
        .into_iter()
        .map(|v| BigRational::from_integer(v.into()))
        .collect()
}
