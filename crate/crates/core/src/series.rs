//! Exact coefficient tables and per-prime run manifests, with their text formats.
//!
//! Series file:
//!
//! ```text
//! #pattern 1324
//! #moduli 4611686018427387847,4611686018427387817
//! 0	1
//! 1	1
//! 2	2
//! ```
//!
//! Residue manifest:
//!
//! ```text
//! #prime 4611686018427387847
//! #maxn 8
//! #seed 0
//! #p 1
//! #factorize on
//! 0	1
//! ```

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::ParseError;

/// Best known upper bound on the growth constant of the class.
pub const GROWTH_UPPER_BOUND: f64 = 13.73718;
/// The same bound as an exact fraction `numerator / denominator`.
pub const GROWTH_BOUND_NUM: u64 = 1_373_718;
pub const GROWTH_BOUND_DEN: u64 = 100_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeriesMetadata {
    pub pattern: String,
    pub moduli: Vec<u64>,
    pub timestamp: Option<String>,
}

/// Exact coefficients `p_0..p_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    pub coefficients: Vec<BigUint>,
    pub metadata: SeriesMetadata,
}

impl SeriesTable {
    pub fn new(coefficients: Vec<BigUint>, metadata: SeriesMetadata) -> Self {
        SeriesTable {
            coefficients,
            metadata,
        }
    }

    pub fn max_n(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.coefficients.get(n)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Checks `p_0 = 1`, strict growth from `n = 1`, and `p_n <= 13.73718^n`.
    pub fn check_invariants(&self) -> Result<(), String> {
        let c = &self.coefficients;
        if c.first().is_none_or(|p| !p.is_one()) {
            return Err("p_0 must be 1".into());
        }
        for n in 2..c.len() {
            if c[n] <= c[n - 1] {
                return Err(format!("p_{n} does not exceed p_{}", n - 1));
            }
        }
        for (n, p) in c.iter().enumerate().skip(1) {
            if !within_growth_bound(p, n as u32) {
                return Err(format!("p_{n} exceeds {GROWTH_UPPER_BOUND}^{n}"));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.metadata.pattern.is_empty() {
            writeln!(out, "#pattern {}", self.metadata.pattern).unwrap();
        }
        if !self.metadata.moduli.is_empty() {
            let m: Vec<String> = self.metadata.moduli.iter().map(u64::to_string).collect();
            writeln!(out, "#moduli {}", m.join(",")).unwrap();
        }
        if let Some(ts) = &self.metadata.timestamp {
            writeln!(out, "#timestamp {ts}").unwrap();
        }
        for (n, p) in self.coefficients.iter().enumerate() {
            writeln!(out, "{n}\t{p}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let mut metadata = SeriesMetadata::default();
        let mut coefficients = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = split_meta(meta);
                match key {
                    "pattern" => metadata.pattern = value.to_string(),
                    "moduli" => {
                        metadata.moduli = value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(|s| s.trim().parse::<u64>())
                            .collect::<Result<_, _>>()
                            .map_err(|e| ParseError::new(lineno, format!("bad modulus: {e}")))?;
                    }
                    "timestamp" => metadata.timestamp = Some(value.to_string()),
                    _ => {}
                }
                continue;
            }
            let (n, value) = split_entry(line, lineno)?;
            if n != coefficients.len() {
                return Err(ParseError::new(
                    lineno,
                    format!("expected n = {}, found {n}", coefficients.len()),
                ));
            }
            let p = value
                .parse::<BigUint>()
                .map_err(|_| ParseError::new(lineno, format!("bad coefficient {value:?}")))?;
            coefficients.push(p);
        }
        Ok(SeriesTable {
            coefficients,
            metadata,
        })
    }
}

/// Options of one modular run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub store_probability: f64,
    pub factorize: bool,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            store_probability: 1.0,
            factorize: true,
            seed: 0,
        }
    }
}

/// Residues `p_0..p_N` modulo one prime.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub max_n: u32,
    pub prime: u64,
    pub options: RunOptions,
    pub residues: Vec<u64>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#prime {}", self.prime).unwrap();
        writeln!(out, "#maxn {}", self.max_n).unwrap();
        writeln!(out, "#seed {}", self.options.seed).unwrap();
        writeln!(out, "#p {}", self.options.store_probability).unwrap();
        writeln!(
            out,
            "#factorize {}",
            if self.options.factorize { "on" } else { "off" }
        )
        .unwrap();
        for (n, r) in self.residues.iter().enumerate() {
            writeln!(out, "{n}\t{r}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let mut prime = None;
        let mut max_n = None;
        let mut options = RunOptions::default();
        let mut residues = Vec::new();
        let mut last_line = 0;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            last_line = lineno;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = split_meta(meta);
                let bad = |what: &str| ParseError::new(lineno, format!("bad {what} {value:?}"));
                match key {
                    "prime" => prime = Some(value.parse::<u64>().map_err(|_| bad("prime"))?),
                    "maxn" => max_n = Some(value.parse::<u32>().map_err(|_| bad("maxn"))?),
                    "seed" => options.seed = value.parse().map_err(|_| bad("seed"))?,
                    "p" => {
                        let p: f64 = value.parse().map_err(|_| bad("probability"))?;
                        if !(p > 0.0 && p <= 1.0) {
                            return Err(bad("probability"));
                        }
                        options.store_probability = p;
                    }
                    "factorize" => {
                        options.factorize = match value {
                            "on" => true,
                            "off" => false,
                            _ => return Err(bad("factorize flag")),
                        }
                    }
                    _ => {}
                }
                continue;
            }
            let Some(prime) = prime else {
                return Err(ParseError::new(lineno, "residue before #prime header"));
            };
            let (n, value) = split_entry(line, lineno)?;
            if n != residues.len() {
                return Err(ParseError::new(
                    lineno,
                    format!("expected n = {}, found {n}", residues.len()),
                ));
            }
            let r: u64 = value
                .parse()
                .map_err(|_| ParseError::new(lineno, format!("bad residue {value:?}")))?;
            if r >= prime {
                return Err(ParseError::new(
                    lineno,
                    format!("residue {r} is not reduced modulo the header prime {prime}"),
                ));
            }
            residues.push(r);
        }
        let prime = prime.ok_or_else(|| ParseError::new(last_line, "missing #prime header"))?;
        let max_n = max_n.ok_or_else(|| ParseError::new(last_line, "missing #maxn header"))?;
        if residues.len() != max_n as usize + 1 {
            return Err(ParseError::new(
                last_line,
                format!(
                    "expected residues for n = 0..={max_n}, found {}",
                    residues.len()
                ),
            ));
        }
        Ok(RunManifest {
            max_n,
            prime,
            options,
            residues,
        })
    }
}

fn split_meta(meta: &str) -> (&str, &str) {
    let meta = meta.trim();
    match meta.split_once(char::is_whitespace) {
        Some((k, v)) => (k, v.trim()),
        None => (meta, ""),
    }
}

fn split_entry(line: &str, lineno: usize) -> Result<(usize, &str), ParseError> {
    let (n, value) = line
        .split_once('\t')
        .ok_or_else(|| ParseError::new(lineno, "expected n<TAB>value"))?;
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|_| ParseError::new(lineno, format!("bad index {n:?}")))?;
    Ok((n, value.trim()))
}

/// `p <= 13.73718^n`, compared exactly.
pub fn within_growth_bound(p: &BigUint, n: u32) -> bool {
    p * BigUint::from(GROWTH_BOUND_DEN).pow(n) <= BigUint::from(GROWTH_BOUND_NUM).pow(n)
}

/// Lossy conversion used for reporting only.
pub fn approx_f64(p: &BigUint) -> f64 {
    p.to_f64().unwrap_or(f64::INFINITY)
}
