//! Single-word modular arithmetic and the ring abstraction used by the counter.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::EnumError;

/// The largest primes below 2^62, in decreasing order.
pub const DEFAULT_PRIMES: [u64; 6] = [
    (1 << 62) - 57,
    (1 << 62) - 87,
    (1 << 62) - 117,
    (1 << 62) - 143,
    (1 << 62) - 153,
    (1 << 62) - 167,
];

/// Arithmetic the signature counter needs from its value type.
pub trait CountRing {
    type Value: Clone;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add_assign(&self, acc: &mut Self::Value, v: &Self::Value);
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

/// An odd prime modulus below 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Self, EnumError> {
        if !(3..1 << 62).contains(&m) || !is_prime(m) {
            return Err(EnumError::BadModulus(m));
        }
        Ok(Modulus(m))
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    pub fn value(&self, residue: u64) -> ModularValue {
        ModularValue {
            residue: residue % self.0,
            modulus: self.0,
        }
    }
}

impl CountRing for Modulus {
    type Value = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    #[inline]
    fn add_assign(&self, acc: &mut u64, v: &u64) {
        // both operands < 2^62, so the sum cannot overflow
        let s = *acc + *v;
        *acc = if s >= self.0 { s - self.0 } else { s };
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
}

/// Exact arbitrary-precision counting.
#[derive(Clone, Copy, Debug, Default)]
pub struct BigCount;

impl CountRing for BigCount {
    type Value = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn one(&self) -> BigUint {
        BigUint::one()
    }

    fn add_assign(&self, acc: &mut BigUint, v: &BigUint) {
        *acc += v;
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
}

/// A residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModularValue {
    pub residue: u64,
    pub modulus: u64,
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
