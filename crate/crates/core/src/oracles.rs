//! Independent reference counts: brute-force pattern avoidance, the closed
//! forms for the classes of 1234 and 1342, and evaluation of the stretched
//! exponential coefficient law.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::OracleError;

/// Largest size accepted by [`brute_count`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// A permutation of `1..=k`, `k >= 2`, used as a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    pub fn new(values: Vec<u32>) -> Result<Self, OracleError> {
        let k = values.len();
        if k < 2 {
            return Err(OracleError::InvalidPattern);
        }
        let mut seen = vec![false; k];
        for &v in &values {
            let idx = (v as usize)
                .checked_sub(1)
                .ok_or(OracleError::InvalidPattern)?;
            if idx >= k || seen[idx] {
                return Err(OracleError::InvalidPattern);
            }
            seen[idx] = true;
        }
        Ok(Pattern(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reverse(&self) -> Pattern {
        Pattern(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Pattern {
        let k = self.0.len() as u32 + 1;
        Pattern(self.0.iter().map(|v| k - v).collect())
    }

    pub fn inverse(&self) -> Pattern {
        let mut inv = vec![0; self.0.len()];
        for (pos, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = pos as u32 + 1;
        }
        Pattern(inv)
    }

    fn is_1324(&self) -> bool {
        self.0 == [1, 3, 2, 4]
    }
}

impl FromStr for Pattern {
    type Err = OracleError;

    /// Digits only, e.g. `1324`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .chars()
            .map(|c| c.to_digit(10).ok_or(OracleError::InvalidPattern))
            .collect::<Result<Vec<_>, _>>()?;
        Pattern::new(values)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// True iff some subsequence of `perm` is order-isomorphic to `pattern`.
pub fn contains_pattern(perm: &[u32], pattern: &Pattern) -> bool {
    (0..perm.len()).any(|end| occurs_ending_at(perm, end, pattern.values()))
}

// An occurrence whose last entry is perm[end].
fn occurs_ending_at(perm: &[u32], end: usize, pattern: &[u32]) -> bool {
    let k = pattern.len();
    if end + 1 < k {
        return false;
    }
    let mut chosen = vec![0u32; k];
    chosen[k - 1] = perm[end];
    extend_occurrence(perm, pattern, &mut chosen, 0, 0, end)
}

fn extend_occurrence(
    perm: &[u32],
    pattern: &[u32],
    chosen: &mut [u32],
    slot: usize,
    from: usize,
    end: usize,
) -> bool {
    let k = pattern.len();
    if slot == k - 1 {
        return true;
    }
    let needed_after = k - 1 - slot;
    for pos in from..end {
        if end - pos < needed_after {
            break;
        }
        let v = perm[pos];
        let consistent = (0..slot)
            .chain(std::iter::once(k - 1))
            .all(|other| (pattern[other] < pattern[slot]) == (chosen[other] < v));
        if consistent {
            chosen[slot] = v;
            if extend_occurrence(perm, pattern, chosen, slot + 1, pos + 1, end) {
                return true;
            }
        }
    }
    false
}

/// Number of permutations of `1..=n` avoiding `pattern`, by extending
/// prefixes and discarding any prefix that already contains the pattern.
///
/// For 1324 a prefix is also discarded as soon as it holds a 132 whose middle
/// value is smaller than some value not yet placed, since that value must
/// eventually complete the pattern.
pub fn brute_count(pattern: &Pattern, n: usize) -> Result<u64, OracleError> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::SizeTooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut search = Search {
        pattern: pattern.values(),
        prune_132: pattern.is_1324(),
        n,
        prefix: Vec::with_capacity(n),
        used: vec![false; n + 1],
    };
    Ok(search.count(u32::MAX))
}

struct Search<'a> {
    pattern: &'a [u32],
    prune_132: bool,
    n: usize,
    prefix: Vec<u32>,
    used: Vec<bool>,
}

impl Search<'_> {
    // `low_top` is the smallest middle value of a 132 in the prefix.
    fn count(&mut self, low_top: u32) -> u64 {
        if self.prefix.len() == self.n {
            return 1;
        }
        let mut total = 0;
        for v in 1..=self.n as u32 {
            if self.used[v as usize] {
                continue;
            }
            self.prefix.push(v);
            self.used[v as usize] = true;
            let end = self.prefix.len() - 1;
            if !occurs_ending_at(&self.prefix, end, self.pattern) {
                let top = if self.prune_132 {
                    low_top.min(self.new_132_top(v))
                } else {
                    u32::MAX
                };
                if !self.prune_132 || top >= self.max_unused() {
                    total += self.count(top);
                }
            }
            self.used[v as usize] = false;
            self.prefix.pop();
        }
        total
    }

    // Smallest `c` with some `a < v < c`, `a` placed before `c`, both before `v`.
    fn new_132_top(&self, v: u32) -> u32 {
        let mut min_before = u32::MAX;
        let mut best = u32::MAX;
        for &c in &self.prefix[..self.prefix.len() - 1] {
            if c > v && min_before < v {
                best = best.min(c);
            }
            min_before = min_before.min(c);
        }
        best
    }

    fn max_unused(&self) -> u32 {
        (1..=self.n as u32)
            .rev()
            .find(|&v| !self.used[v as usize])
            .unwrap_or(0)
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Number of 1234-avoiding permutations of length `n` (the binomial sum
/// divided by `(n+1)^2 (n+2)`); 1 for `n = 0`.
pub fn p1234(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let sum = p1234_numerator(n);
    let den = BigUint::from((n + 1) * (n + 1) * (n + 2));
    let (q, r) = sum.div_rem(&den);
    debug_assert!(r.is_zero());
    q
}

/// The binomial sum behind [`p1234`], before division.
pub fn p1234_numerator(n: u64) -> BigUint {
    (0..=n)
        .map(|k| binomial(2 * k, k) * binomial(n + 1, k + 1) * binomial(n + 2, k + 1))
        .sum()
}

/// Number of 1342-avoiding permutations of length `n`; 1 for `n = 0`.
///
/// The alternating sum runs over `i = 2..=n`; individual terms are rational,
/// so they are accumulated over a common denominator.
pub fn p1342(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let sign = |e: u64| {
        if e.is_multiple_of(2) {
            BigInt::one()
        } else {
            -BigInt::one()
        }
    };
    let poly = BigInt::from(7 * n * n - 3 * n - 2) / 2;
    let mut num: BigInt = sign(n - 1) * poly;
    let mut den: BigInt = BigInt::one();
    for i in 2..=n {
        let term_num = sign(n - i)
            * BigInt::from(3u32)
            * (BigInt::one() << (i + 1))
            * BigInt::from(factorial(2 * i - 4))
            * BigInt::from(binomial(n - i + 2, 2));
        let term_den = BigInt::from(factorial(i) * factorial(i - 2));
        num = num * &term_den + term_num * &den;
        den *= term_den;
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
    }
    assert!(
        den.is_one() && !num.is_negative(),
        "closed form is not a count"
    );
    num.to_biguint().expect("non-negative")
}

/// Parameters of `B · μ^n · μ1^(n^σ) · n^g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticParams {
    /// `B`
    pub amplitude: f64,
    /// `μ`
    pub growth: f64,
    /// `μ1`
    pub stretch_base: f64,
    /// `σ`
    pub stretch_power: f64,
    /// `g`
    pub power: f64,
}

impl AsymptoticParams {
    pub fn new(
        amplitude: f64,
        growth: f64,
        stretch_base: f64,
        stretch_power: f64,
        power: f64,
    ) -> Self {
        AsymptoticParams {
            amplitude,
            growth,
            stretch_base,
            stretch_power,
            power,
        }
    }

    /// Natural log of the form at `n`.
    pub fn ln_value(&self, n: f64) -> Result<f64, OracleError> {
        if !(self.amplitude > 0.0 && self.growth > 0.0 && self.stretch_base > 0.0) {
            return Err(OracleError::DomainError);
        }
        Ok(self.amplitude.ln()
            + n * self.growth.ln()
            + n.powf(self.stretch_power) * self.stretch_base.ln()
            + self.power * n.ln())
    }
}

/// A positive number too large for `f64`, as `mantissa × 10^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnitude {
    pub log10: f64,
    pub mantissa: f64,
    pub exponent: i64,
}

impl Magnitude {
    pub fn from_log10(log10: f64) -> Self {
        let exponent = log10.floor();
        Magnitude {
            log10,
            mantissa: 10f64.powf(log10 - exponent),
            exponent: exponent as i64,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}e{}", self.mantissa, self.exponent)
    }
}

/// Evaluates the coefficient law at `n` in log space.
pub fn asym_eval(params: &AsymptoticParams, n: u64) -> Result<Magnitude, OracleError> {
    if !(params.amplitude > 0.0 && params.growth > 0.0 && params.stretch_base > 0.0) {
        return Err(OracleError::DomainError);
    }
    let nf = n as f64;
    let log10 = params.amplitude.log10()
        + nf * params.growth.log10()
        + nf.powf(params.stretch_power) * params.stretch_base.log10()
        + params.power * nf.log10();
    Ok(Magnitude::from_log10(log10))
}

/// Lossy view of an exact count, for reporting.
pub fn to_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}
