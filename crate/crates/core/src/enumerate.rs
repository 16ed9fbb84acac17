//! Memoized counting of signature completions, per-prime series runs and
//! Chinese-remainder reconstruction.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::codec::{encode, MAX_TOTAL};
use crate::error::EnumError;
use crate::memo::MemoStore;
use crate::modular::{mul_mod, pow_mod, BigCount, CountRing, Modulus, DEFAULT_PRIMES};
use crate::series::{
    RunManifest, RunOptions, SeriesMetadata, SeriesTable, GROWTH_BOUND_DEN, GROWTH_BOUND_NUM,
};
use crate::signature::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Combine {
    Sum,
    Product,
}

struct Frame<V> {
    key: u128,
    parts: Vec<Signature>,
    next: usize,
    acc: V,
    combine: Combine,
}

enum Step<V> {
    Known(V),
    Expand(Frame<V>),
}

/// Number of 1324-avoiding completions of `sig`, in the ring `ring`.
///
/// `f(empty) = 1`; with `factorize`, a signature that splits into several
/// independent factors is the product of their counts, otherwise it is the sum
/// over its children. Evaluation is depth-first with an explicit stack.
pub fn count_signature<R: CountRing>(
    sig: &Signature,
    store: &mut MemoStore<R::Value>,
    ring: &R,
    factorize: bool,
) -> Result<R::Value, EnumError> {
    if sig.total() > MAX_TOTAL {
        return Err(EnumError::TooLarge(sig.total()));
    }
    let mut stack = match step(sig, store, ring, factorize)? {
        Step::Known(v) => return Ok(v),
        Step::Expand(frame) => vec![frame],
    };
    loop {
        let top = stack
            .last_mut()
            .expect("stack is non-empty inside the loop");
        if top.next < top.parts.len() {
            let part = std::mem::take(&mut top.parts[top.next]);
            top.next += 1;
            match step(&part, store, ring, factorize)? {
                Step::Known(v) => fold(ring, top, &v),
                Step::Expand(frame) => stack.push(frame),
            }
            continue;
        }
        let done = stack.pop().expect("checked above");
        store.offer(done.key, &done.acc);
        match stack.last_mut() {
            Some(parent) => fold(ring, parent, &done.acc),
            None => return Ok(done.acc),
        }
    }
}

fn fold<R: CountRing>(ring: &R, frame: &mut Frame<R::Value>, v: &R::Value) {
    match frame.combine {
        Combine::Sum => ring.add_assign(&mut frame.acc, v),
        Combine::Product => frame.acc = ring.mul(&frame.acc, v),
    }
}

fn step<R: CountRing>(
    sig: &Signature,
    store: &mut MemoStore<R::Value>,
    ring: &R,
    factorize: bool,
) -> Result<Step<R::Value>, EnumError> {
    // A single remaining value always has exactly one completion.
    if sig.total() <= 1 {
        return Ok(Step::Known(ring.one()));
    }
    let key = encode(sig)?.bits();
    if let Some(v) = store.get(key) {
        return Ok(Step::Known(v.clone()));
    }
    if factorize {
        let parts = sig.factor_split();
        if parts.len() > 1 {
            return Ok(Step::Expand(Frame {
                key,
                parts,
                next: 0,
                acc: ring.one(),
                combine: Combine::Product,
            }));
        }
    }
    let parts = sig.children().expect("total is at least 2");
    Ok(Step::Expand(Frame {
        key,
        parts,
        next: 0,
        acc: ring.zero(),
        combine: Combine::Sum,
    }))
}

/// Residues of `p_0..p_max_n` modulo `prime`, sharing one memo store.
pub fn series_mod(max_n: u32, prime: u64, options: RunOptions) -> Result<RunManifest, EnumError> {
    if max_n > MAX_TOTAL {
        return Err(EnumError::TooLarge(max_n));
    }
    let modulus = Modulus::new(prime)?;
    let mut store = MemoStore::new(options.store_probability, options.seed);
    let residues = (0..=max_n)
        .map(|n| {
            count_signature(
                &Signature::fresh(n),
                &mut store,
                &modulus,
                options.factorize,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunManifest {
        max_n,
        prime,
        options,
        residues,
    })
}

/// Exact coefficients `p_0..p_max_n` with arbitrary-precision accumulation.
pub fn series_bigint(max_n: u32, options: RunOptions) -> Result<Vec<BigUint>, EnumError> {
    if max_n > MAX_TOTAL {
        return Err(EnumError::TooLarge(max_n));
    }
    let mut store = MemoStore::new(options.store_probability, options.seed);
    (0..=max_n)
        .map(|n| {
            count_signature(
                &Signature::fresh(n),
                &mut store,
                &BigCount,
                options.factorize,
            )
        })
        .collect()
}

/// Smallest `k` such that the product of the first `k` primes exceeds
/// `13.73718^max_n`, the bound on every coefficient up to `max_n`.
pub fn required_prime_count(max_n: u32, primes: &[u64]) -> Result<usize, EnumError> {
    let bound_num = BigUint::from(GROWTH_BOUND_NUM).pow(max_n);
    let den = BigUint::from(GROWTH_BOUND_DEN).pow(max_n);
    let mut product = den;
    for (k, &m) in primes.iter().enumerate() {
        product *= m;
        if product > bound_num {
            return Ok(k + 1);
        }
    }
    Err(EnumError::InsufficientPrimes { max_n })
}

/// The default primes for an enumeration up to `max_n`: as many as needed for
/// reconstruction, followed by one more used as an independent check.
pub fn auto_primes(max_n: u32) -> Result<(Vec<u64>, u64), EnumError> {
    let k = required_prime_count(max_n, &DEFAULT_PRIMES)?;
    let check = *DEFAULT_PRIMES
        .get(k)
        .ok_or(EnumError::InsufficientPrimes { max_n })?;
    Ok((DEFAULT_PRIMES[..k].to_vec(), check))
}

/// The unique `x < Π m_i` with `x ≡ r_i (mod m_i)`, for distinct primes `m_i`.
pub fn crt_reconstruct(residues: &[(u64, u64)]) -> Result<BigUint, EnumError> {
    let mut x = BigUint::zero();
    let mut product = BigUint::from(1u32);
    let mut seen: Vec<u64> = Vec::with_capacity(residues.len());
    for &(r, m) in residues {
        Modulus::new(m)?;
        if seen.contains(&m) {
            return Err(EnumError::ModulusClash(m));
        }
        seen.push(m);
        let x_mod = (&x % m).to_u64().expect("reduced below a u64 modulus");
        let prod_mod = (&product % m)
            .to_u64()
            .expect("reduced below a u64 modulus");
        let diff = (r % m + m - x_mod) % m;
        let t = mul_mod(diff, pow_mod(prod_mod, m - 2, m), m);
        x += &product * t;
        product *= m;
    }
    Ok(x)
}

/// Reconstructs exact coefficients from per-prime runs, validating every
/// coefficient against `check` when given.
pub fn crt_combine(
    manifests: &[RunManifest],
    check: Option<&RunManifest>,
) -> Result<SeriesTable, EnumError> {
    if manifests.len() < 2 {
        return Err(EnumError::TooFewRuns);
    }
    let max_n = manifests[0].max_n;
    let mut primes = Vec::new();
    for m in manifests.iter().chain(check) {
        if m.max_n != max_n {
            return Err(EnumError::LengthMismatch(max_n, m.max_n));
        }
        if m.residues.len() != max_n as usize + 1 {
            return Err(EnumError::LengthMismatch(
                max_n,
                (m.residues.len() as u32).saturating_sub(1),
            ));
        }
        Modulus::new(m.prime)?;
        if primes.contains(&m.prime) {
            return Err(EnumError::ModulusClash(m.prime));
        }
        primes.push(m.prime);
    }
    let used: Vec<u64> = manifests.iter().map(|m| m.prime).collect();
    if required_prime_count(max_n, &used).is_err() {
        return Err(EnumError::BoundExceeded { max_n });
    }
    let mut coefficients = Vec::with_capacity(max_n as usize + 1);
    for n in 0..=max_n as usize {
        let pairs: Vec<(u64, u64)> = manifests.iter().map(|m| (m.residues[n], m.prime)).collect();
        let value = crt_reconstruct(&pairs)?;
        if let Some(c) = check {
            let found = (&value % c.prime)
                .to_u64()
                .expect("reduced below a u64 modulus");
            if found != c.residues[n] {
                return Err(EnumError::CheckFailed {
                    n: n as u32,
                    prime: c.prime,
                    expected: c.residues[n],
                    found,
                });
            }
        }
        coefficients.push(value);
    }
    Ok(SeriesTable::new(
        coefficients,
        SeriesMetadata {
            pattern: "1324".into(),
            moduli: primes,
            timestamp: None,
        },
    ))
}

/// How exact coefficients are obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Residue runs modulo each prime, reconstructed by CRT and optionally
    /// validated modulo `check`.
    Crt {
        primes: Vec<u64>,
        check: Option<u64>,
    },
    /// Direct arbitrary-precision accumulation.
    BigInt,
}

impl Mode {
    /// CRT with the default primes.
    pub fn auto_crt(max_n: u32) -> Result<Mode, EnumError> {
        let (primes, check) = auto_primes(max_n)?;
        Ok(Mode::Crt {
            primes,
            check: Some(check),
        })
    }
}

/// The result of an enumeration together with its per-prime runs.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub table: SeriesTable,
    pub runs: Vec<RunManifest>,
    pub check_run: Option<RunManifest>,
}

pub fn enumerate(max_n: u32, mode: &Mode, options: RunOptions) -> Result<Enumeration, EnumError> {
    if max_n > MAX_TOTAL {
        return Err(EnumError::TooLarge(max_n));
    }
    match mode {
        Mode::BigInt => {
            let coefficients = series_bigint(max_n, options)?;
            Ok(Enumeration {
                table: SeriesTable::new(
                    coefficients,
                    SeriesMetadata {
                        pattern: "1324".into(),
                        ..Default::default()
                    },
                ),
                runs: Vec::new(),
                check_run: None,
            })
        }
        Mode::Crt { primes, check } => {
            if let Some(c) = check {
                if primes.contains(c) {
                    return Err(EnumError::ModulusClash(*c));
                }
            }
            for &m in primes.iter().chain(check) {
                Modulus::new(m)?;
            }
            if required_prime_count(max_n, primes).is_err() {
                return Err(EnumError::InsufficientPrimes { max_n });
            }
            let runs = primes
                .iter()
                .map(|&m| series_mod(max_n, m, options))
                .collect::<Result<Vec<_>, _>>()?;
            let check_run = check.map(|m| series_mod(max_n, m, options)).transpose()?;
            let table = if runs.len() == 1 {
                single_prime_table(&runs[0], check_run.as_ref())?
            } else {
                crt_combine(&runs, check_run.as_ref())?
            };
            Ok(Enumeration {
                table,
                runs,
                check_run,
            })
        }
    }
}

/// Exact coefficients `p_0..p_max_n`.
pub fn enumerate_series(
    max_n: u32,
    mode: &Mode,
    options: RunOptions,
) -> Result<SeriesTable, EnumError> {
    enumerate(max_n, mode, options).map(|e| e.table)
}

// Small problems fit under one prime; residues are then the coefficients.
fn single_prime_table(
    run: &RunManifest,
    check: Option<&RunManifest>,
) -> Result<SeriesTable, EnumError> {
    let mut coefficients = Vec::with_capacity(run.residues.len());
    for (n, &r) in run.residues.iter().enumerate() {
        if let Some(c) = check {
            let found = r % c.prime;
            if found != c.residues[n] {
                return Err(EnumError::CheckFailed {
                    n: n as u32,
                    prime: c.prime,
                    expected: c.residues[n],
                    found,
                });
            }
        }
        coefficients.push(BigUint::from(r));
    }
    Ok(SeriesTable::new(
        coefficients,
        SeriesMetadata {
            pattern: "1324".into(),
            moduli: std::iter::once(run.prime)
                .chain(check.map(|c| c.prime))
                .collect(),
            timestamp: None,
        },
    ))
}
